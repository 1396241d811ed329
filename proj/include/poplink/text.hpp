#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <iterator>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace poplink::text {

inline char ascii_lower(char c) {
	return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

inline char ascii_upper(char c) {
	return (c >= 'a' && c <= 'z') ? static_cast<char>(c - 'a' + 'A') : c;
}

inline std::string to_lower(std::string_view s) {
	std::string out(s);
	std::transform(out.begin(), out.end(), out.begin(), ascii_lower);
	return out;
}

inline std::string to_upper(std::string_view s) {
	std::string out(s);
	std::transform(out.begin(), out.end(), out.begin(), ascii_upper);
	return out;
}

inline bool iequals(std::string_view a, std::string_view b) {
	return a.size() == b.size() &&
	       std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) { return ascii_lower(x) == ascii_lower(y); });
}

inline std::string_view trim(std::string_view s) {
	auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v'; };
	while (!s.empty() && is_space(s.front())) {
		s.remove_prefix(1);
	}
	while (!s.empty() && is_space(s.back())) {
		s.remove_suffix(1);
	}
	return s;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
	std::vector<std::string_view> out;
	std::size_t start = 0;
	while (true) {
		auto pos = s.find(sep, start);
		if (pos == std::string_view::npos) {
			out.push_back(s.substr(start));
			return out;
		}
		out.push_back(s.substr(start, pos - start));
		start = pos + 1;
	}
}

inline std::optional<int> parse_int(std::string_view s) {
	s = trim(s);
	if (!s.empty() && s.front() == '+') {
		s.remove_prefix(1);
	}
	int value = 0;
	auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
	if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
		return std::nullopt;
	}
	return value;
}

inline std::optional<double> parse_double(std::string_view s) {
	s = trim(s);
	if (s.empty()) {
		return std::nullopt;
	}
	std::string buf(s);
	char *end = nullptr;
	double v = std::strtod(buf.c_str(), &end);
	if (end != buf.c_str() + buf.size()) {
		return std::nullopt;
	}
	return v;
}

namespace detail {

// ASCII fold for U+00C0..U+017F (Latin-1 Supplement and Latin Extended-A).
inline std::string_view fold_codepoint(char32_t cp) {
	static constexpr std::string_view latin1[64] = {
	    "A", "A", "A", "A", "A", "A", "AE", "C", "E", "E", "E", "E", "I", "I", "I", "I",  // C0
	    "D", "N", "O", "O", "O", "O", "O",  "",  "O", "U", "U", "U", "U", "Y", "TH", "ss", // D0
	    "a", "a", "a", "a", "a", "a", "ae", "c", "e", "e", "e", "e", "i", "i", "i", "i",  // E0
	    "d", "n", "o", "o", "o", "o", "o",  "",  "o", "u", "u", "u", "u", "y", "th", "y", // F0
	};
	if (cp >= 0xC0 && cp <= 0xFF) {
		return latin1[cp - 0xC0];
	}
	if (cp >= 0x100 && cp <= 0x17F) {
		// Latin Extended-A comes in upper/lower pairs grouped by base letter.
		static constexpr std::string_view ext[] = {
		    "A", "a", "A", "a", "A", "a", "C", "c", "C", "c", "C", "c", "C", "c", "D", "d", // 100
		    "D", "d", "E", "e", "E", "e", "E", "e", "E", "e", "E", "e", "G", "g", "G", "g", // 110
		    "G", "g", "G", "g", "H", "h", "H", "h", "I", "i", "I", "i", "I", "i", "I", "i", // 120
		    "I", "i", "IJ", "ij", "J", "j", "K", "k", "k", "L", "l", "L", "l", "L", "l", "L", // 130
		    "l", "L", "l", "N", "n", "N", "n", "N", "n", "n", "N", "n", "O", "o", "O", "o", // 140
		    "O", "o", "OE", "oe", "R", "r", "R", "r", "R", "r", "S", "s", "S", "s", "S", "s", // 150
		    "S", "s", "T", "t", "T", "t", "T", "t", "U", "u", "U", "u", "U", "u", "U", "u", // 160
		    "U", "u", "U", "u", "W", "w", "Y", "y", "Y", "Z", "z", "Z", "z", "Z", "z", "s", // 170
		};
		static_assert(std::size(ext) == 0x80);
		return ext[cp - 0x100];
	}
	return {};
}

} // namespace detail

/// Transliterate UTF-8 text to ASCII. Accented Latin letters lose their
/// diacritics; code points outside the Latin ranges are dropped.
inline std::string to_ascii(std::string_view s) {
	std::string out;
	out.reserve(s.size());
	for (std::size_t i = 0; i < s.size();) {
		auto b0 = static_cast<unsigned char>(s[i]);
		if (b0 < 0x80) {
			out.push_back(static_cast<char>(b0));
			++i;
			continue;
		}
		int len = (b0 >= 0xF0) ? 4 : (b0 >= 0xE0) ? 3 : (b0 >= 0xC0) ? 2 : 1;
		if (len == 1 || i + static_cast<std::size_t>(len) > s.size()) {
			++i; // stray continuation byte or truncated sequence
			continue;
		}
		char32_t cp = b0 & (0xFF >> (len + 1));
		for (int k = 1; k < len; ++k) {
			cp = (cp << 6) | (static_cast<unsigned char>(s[i + static_cast<std::size_t>(k)]) & 0x3F);
		}
		out.append(detail::fold_codepoint(cp));
		i += static_cast<std::size_t>(len);
	}
	return out;
}

} // namespace poplink::text
