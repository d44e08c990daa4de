#include "agora/time_util.hpp"

#include <cstdio>
#include <ctime>

#include "agora/errors.hpp"

namespace agora {

std::string to_iso8601(EpochSeconds t) {
  std::time_t tt = static_cast<std::time_t>(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[80];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
  return buf;
}

EpochSeconds from_iso8601(const std::string& text) {
  std::tm tm{};
  int y, mo, d, h, mi, s;
  if (std::sscanf(text.c_str(), "%d-%d-%dT%d:%d:%dZ", &y, &mo, &d, &h, &mi, &s) != 6) {
    throw Error(Errc::SerializationError, "bad timestamp '" + text + "'");
  }
  tm.tm_year = y - 1900;
  tm.tm_mon = mo - 1;
  tm.tm_mday = d;
  tm.tm_hour = h;
  tm.tm_min = mi;
  tm.tm_sec = s;
  return static_cast<EpochSeconds>(timegm(&tm));
}

EpochSeconds WallClock::at_event(std::uint64_t) {
  return static_cast<EpochSeconds>(std::time(nullptr));
}

}  // namespace agora
