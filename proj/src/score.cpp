#include "trustmw/score.hpp"

#include <cctype>

#include "trustmw/error.hpp"

namespace trustmw {

Score Score::parse(std::string_view text) {
  auto bad = [&](const char* why) {
    return Error(ErrorCode::invalid_argument, "invalid score '" + std::string(text) + "': " + why);
  };
  std::string_view s = text;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) throw bad("empty");
  std::int64_t whole = 0;
  std::size_t i = 0;
  for (; i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])); ++i) {
    whole = whole * 10 + (s[i] - '0');
    if (whole > 1000000) throw bad("out of range");
  }
  const std::size_t int_digits = i;
  std::int64_t frac = 0;
  std::size_t frac_digits = 0;
  if (i < s.size() && s[i] == '.') {
    ++i;
    for (; i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])); ++i, ++frac_digits) {
      if (frac_digits >= 4) {
        if (s[i] != '0') throw bad("more than four fractional digits");
        continue;
      }
      frac = frac * 10 + (s[i] - '0');
    }
  }
  if (i != s.size() || (int_digits == 0 && frac_digits == 0)) throw bad("not a decimal");
  for (std::size_t k = std::min<std::size_t>(frac_digits, 4); k < 4; ++k) frac *= 10;
  return Score(static_cast<std::int32_t>(whole * kScale + frac));
}

std::string Score::to_string() const {
  std::string out = std::to_string(units_ / kScale);
  std::int32_t frac = units_ % kScale;
  std::string digits = std::to_string(frac + kScale).substr(1);
  while (digits.size() > 1 && digits.back() == '0') digits.pop_back();
  return out + "." + digits;
}

}  // namespace trustmw
