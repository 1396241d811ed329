#pragma once

#include "poplink/text.hpp"

#include <initializer_list>
#include <string>
#include <string_view>

namespace poplink {

namespace phonetic_detail {

/// Upper-case ASCII letters only (after transliteration); everything else
/// apart from inner spaces is dropped.
inline std::string letters_only(std::string_view s, bool keep_spaces) {
	std::string out;
	for (char c : text::to_ascii(s)) {
		char u = text::ascii_upper(c);
		if (u >= 'A' && u <= 'Z') {
			out.push_back(u);
		} else if (keep_spaces && (c == ' ' || c == '\t') && !out.empty() && out.back() != ' ') {
			out.push_back(' ');
		}
	}
	while (!out.empty() && out.back() == ' ') {
		out.pop_back();
	}
	return out;
}

} // namespace phonetic_detail

/// American Soundex: first letter plus three digits. H and W do not
/// separate equal codes, vowels do. Empty input (or no letters) gives "".
inline std::string soundex(std::string_view s) {
	// A  B  C  D  E  F  G  H  I  J  K  L  M  N  O  P  Q  R  S  T  U  V  W  X  Y  Z
	static constexpr char codes[] = "01230120022455012623010202";
	auto letters = phonetic_detail::letters_only(s, false);
	if (letters.empty()) {
		return {};
	}
	std::string out(1, letters[0]);
	char last = codes[letters[0] - 'A'];
	for (std::size_t i = 1; i < letters.size() && out.size() < 4; ++i) {
		char c = letters[i];
		char code = codes[c - 'A'];
		if (c == 'H' || c == 'W') {
			continue;
		}
		if (code == '0') {
			last = '0';
			continue;
		}
		if (code != last) {
			out.push_back(code);
		}
		last = code;
	}
	out.resize(4, '0');
	return out;
}

struct MetaphoneCodes {
	std::string primary;
	std::string alternate;

	friend bool operator==(const MetaphoneCodes &, const MetaphoneCodes &) = default;
};

/// Double Metaphone (Lawrence Philips' rule set). The alternate code equals
/// the primary when no rule forks. `max_length` of 0 keeps full-length codes.
class DoubleMetaphone {
public:
	explicit DoubleMetaphone(std::size_t max_length = 4) : max_length_(max_length) {}

	[[nodiscard]] MetaphoneCodes encode(std::string_view input) const {
		Encoder enc(phonetic_detail::letters_only(input, true), max_length_);
		return enc.run();
	}

private:
	class Encoder {
	public:
		Encoder(std::string value, std::size_t max_length) : v_(std::move(value)), max_(max_length) {
			n_ = static_cast<int>(v_.size());
			slavo_germanic_ = v_.find('W') != std::string::npos || v_.find('K') != std::string::npos ||
			                  v_.find("CZ") != std::string::npos || v_.find("WITZ") != std::string::npos;
		}

		MetaphoneCodes run() {
			if (v_.empty()) {
				return {};
			}
			int i = 0;
			if (at(0, 2, {"GN", "KN", "PN", "WR", "PS"})) {
				i = 1;
			}
			while (!complete() && i < n_) {
				switch (v_[static_cast<std::size_t>(i)]) {
				case 'A':
				case 'E':
				case 'I':
				case 'O':
				case 'U':
				case 'Y':
					if (i == 0) {
						add("A");
					}
					i += 1;
					break;
				case 'B':
					add("P");
					i += ch(i + 1) == 'B' ? 2 : 1;
					break;
				case 'C':
					i = on_c(i);
					break;
				case 'D':
					i = on_d(i);
					break;
				case 'F':
					add("F");
					i += ch(i + 1) == 'F' ? 2 : 1;
					break;
				case 'G':
					i = on_g(i);
					break;
				case 'H':
					i = on_h(i);
					break;
				case 'J':
					i = on_j(i);
					break;
				case 'K':
					add("K");
					i += ch(i + 1) == 'K' ? 2 : 1;
					break;
				case 'L':
					i = on_l(i);
					break;
				case 'M':
					add("M");
					i += m_is_doubled(i) ? 2 : 1;
					break;
				case 'N':
					add("N");
					i += ch(i + 1) == 'N' ? 2 : 1;
					break;
				case 'P':
					if (ch(i + 1) == 'H') {
						add("F");
						i += 2;
					} else {
						add("P");
						i += at(i + 1, 1, {"P", "B"}) ? 2 : 1;
					}
					break;
				case 'Q':
					add("K");
					i += ch(i + 1) == 'Q' ? 2 : 1;
					break;
				case 'R':
					i = on_r(i);
					break;
				case 'S':
					i = on_s(i);
					break;
				case 'T':
					i = on_t(i);
					break;
				case 'V':
					add("F");
					i += ch(i + 1) == 'V' ? 2 : 1;
					break;
				case 'W':
					i = on_w(i);
					break;
				case 'X':
					i = on_x(i);
					break;
				case 'Z':
					i = on_z(i);
					break;
				default:
					i += 1;
					break;
				}
			}
			return {primary_, alternate_};
		}

	private:
		[[nodiscard]] char ch(int i) const { return (i >= 0 && i < n_) ? v_[static_cast<std::size_t>(i)] : '\0'; }

		[[nodiscard]] bool at(int start, int len, std::initializer_list<std::string_view> options) const {
			if (start < 0 || start + len > n_) {
				return false;
			}
			std::string_view window(v_.data() + start, static_cast<std::size_t>(len));
			for (auto o : options) {
				if (window == o) {
					return true;
				}
			}
			return false;
		}

		[[nodiscard]] bool vowel(int i) const {
			char c = ch(i);
			return c == 'A' || c == 'E' || c == 'I' || c == 'O' || c == 'U' || c == 'Y';
		}

		[[nodiscard]] bool complete() const {
			return max_ != 0 && primary_.size() >= max_ && alternate_.size() >= max_;
		}

		void push(std::string &code, std::string_view s) const {
			for (char c : s) {
				if (max_ == 0 || code.size() < max_) {
					code.push_back(c);
				}
			}
		}

		void add(std::string_view both) {
			push(primary_, both);
			push(alternate_, both);
		}
		void add(std::string_view p, std::string_view a) {
			push(primary_, p);
			push(alternate_, a);
		}

		bool germanic_prefix() const { return at(0, 4, {"VAN ", "VON "}) || at(0, 3, {"SCH"}); }

		int on_c(int i) {
			// Germanic "ach" as in "bacher", "macher"; also "chianti".
			if (i > 1 && !vowel(i - 2) && at(i - 1, 3, {"ACH"}) && ch(i + 2) != 'I' &&
			    (ch(i + 2) != 'E' || at(i - 2, 6, {"BACHER", "MACHER"}))) {
				add("K");
				return i + 2;
			}
			if (i == 0 && at(i, 6, {"CAESAR"})) {
				add("S");
				return i + 2;
			}
			if (at(i, 4, {"CHIA"})) {
				add("K");
				return i + 2;
			}
			if (at(i, 2, {"CH"})) {
				return on_ch(i);
			}
			if (at(i, 2, {"CZ"}) && !at(i - 2, 4, {"WICZ"})) {
				add("S", "X");
				return i + 2;
			}
			if (at(i + 1, 3, {"CIA"})) {
				add("X");
				return i + 3;
			}
			if (at(i, 2, {"CC"}) && !(i == 1 && ch(0) == 'M')) {
				if (at(i + 2, 1, {"I", "E", "H"}) && !at(i + 2, 2, {"HU"})) {
					if ((i == 1 && ch(i - 1) == 'A') || at(i - 1, 5, {"UCCEE", "UCCES"})) {
						add("KS");
					} else {
						add("X");
					}
					return i + 3;
				}
				add("K");
				return i + 2;
			}
			if (at(i, 2, {"CK", "CG", "CQ"})) {
				add("K");
				return i + 2;
			}
			if (at(i, 2, {"CI", "CE", "CY"})) {
				if (at(i, 3, {"CIO", "CIE", "CIA"})) {
					add("S", "X");
				} else {
					add("S");
				}
				return i + 2;
			}
			add("K");
			if (at(i + 1, 2, {" C", " Q", " G"})) {
				return i + 3;
			}
			if (at(i + 1, 1, {"C", "K", "Q"}) && !at(i + 1, 2, {"CE", "CI"})) {
				return i + 2;
			}
			return i + 1;
		}

		int on_ch(int i) {
			if (i > 0 && at(i, 4, {"CHAE"})) {
				add("K", "X");
				return i + 2;
			}
			// Greek roots: "chemistry", "chorus".
			if (i == 0 && (at(i + 1, 5, {"HARAC", "HARIS"}) || at(i + 1, 3, {"HOR", "HYM", "HIA", "HEM"})) &&
			    !at(0, 5, {"CHORE"})) {
				add("K");
				return i + 2;
			}
			if (germanic_prefix() || at(i - 2, 6, {"ORCHES", "ARCHIT", "ORCHID"}) || at(i + 2, 1, {"T", "S"}) ||
			    ((at(i - 1, 1, {"A", "O", "U", "E"}) || i == 0) &&
			     (at(i + 2, 1, {"L", "R", "N", "M", "B", "H", "F", "V", "W", " "}) || i + 1 == n_ - 1))) {
				add("K");
				return i + 2;
			}
			if (i > 0) {
				if (at(0, 2, {"MC"})) {
					add("K");
				} else {
					add("X", "K");
				}
			} else {
				add("X");
			}
			return i + 2;
		}

		int on_d(int i) {
			if (at(i, 2, {"DG"})) {
				if (at(i + 2, 1, {"I", "E", "Y"})) {
					add("J");
					return i + 3;
				}
				add("TK");
				return i + 2;
			}
			if (at(i, 2, {"DT", "DD"})) {
				add("T");
				return i + 2;
			}
			add("T");
			return i + 1;
		}

		int on_g(int i) {
			if (ch(i + 1) == 'H') {
				return on_gh(i);
			}
			if (ch(i + 1) == 'N') {
				if (i == 1 && vowel(0) && !slavo_germanic_) {
					add("KN", "N");
				} else if (!at(i + 2, 2, {"EY"}) && ch(i + 1) != 'Y' && !slavo_germanic_) {
					add("N", "KN");
				} else {
					add("KN");
				}
				return i + 2;
			}
			if (at(i + 1, 2, {"LI"}) && !slavo_germanic_) {
				add("KL", "L");
				return i + 2;
			}
			if (i == 0 && (ch(i + 1) == 'Y' ||
			               at(i + 1, 2, {"ES", "EP", "EB", "EL", "EY", "IB", "IL", "IN", "IE", "EI", "ER"}))) {
				add("K", "J");
				return i + 2;
			}
			if ((at(i + 1, 2, {"ER"}) || ch(i + 1) == 'Y') && !at(0, 6, {"DANGER", "RANGER", "MANGER"}) &&
			    !at(i - 1, 1, {"E", "I"}) && !at(i - 1, 3, {"RGY", "OGY"})) {
				add("K", "J");
				return i + 2;
			}
			if (at(i + 1, 1, {"E", "I", "Y"}) || at(i - 1, 4, {"AGGI", "OGGI"})) {
				if (germanic_prefix() || at(i + 1, 2, {"ET"})) {
					add("K");
				} else if (at(i + 1, 4, {"IER "}) || (at(i + 1, 3, {"IER"}) && i + 4 == n_)) {
					add("J");
				} else {
					add("J", "K");
				}
				return i + 2;
			}
			add("K");
			return ch(i + 1) == 'G' ? i + 2 : i + 1;
		}

		int on_gh(int i) {
			if (i > 0 && !vowel(i - 1)) {
				add("K");
				return i + 2;
			}
			if (i == 0) {
				add(ch(i + 2) == 'I' ? "J" : "K");
				return i + 2;
			}
			// Parker's rule: "hugh", "bough", "broughton" keep the gh silent.
			if ((i > 1 && at(i - 2, 1, {"B", "H", "D"})) || (i > 2 && at(i - 3, 1, {"B", "H", "D"})) ||
			    (i > 3 && at(i - 4, 1, {"B", "H"}))) {
				return i + 2;
			}
			if (i > 2 && ch(i - 1) == 'U' && at(i - 3, 1, {"C", "G", "L", "R", "T"})) {
				add("F");
			} else if (i > 0 && ch(i - 1) != 'I') {
				add("K");
			}
			return i + 2;
		}

		int on_h(int i) {
			if ((i == 0 || vowel(i - 1)) && vowel(i + 1)) {
				add("H");
				return i + 2;
			}
			return i + 1;
		}

		int on_j(int i) {
			if (at(i, 4, {"JOSE"}) || at(0, 4, {"SAN "})) {
				if ((i == 0 && ch(i + 4) == ' ') || at(0, 4, {"SAN "})) {
					add("H");
				} else {
					add("J", "H");
				}
				return i + 1;
			}
			if (i == 0) {
				add("J", "A");
			} else if (vowel(i - 1) && !slavo_germanic_ && (ch(i + 1) == 'A' || ch(i + 1) == 'O')) {
				add("J", "H");
			} else if (i == n_ - 1) {
				add("J", "");
			} else if (!at(i + 1, 1, {"L", "T", "K", "S", "N", "M", "B", "Z"}) && !at(i - 1, 1, {"S", "K", "L"})) {
				add("J");
			}
			return ch(i + 1) == 'J' ? i + 2 : i + 1;
		}

		int on_l(int i) {
			if (ch(i + 1) == 'L') {
				// Spanish "cabrillo", "gallegos": the second L is silent in the alternate only.
				bool spanish = (i == n_ - 3 && at(i - 1, 4, {"ILLO", "ILLA", "ALLE"})) ||
				               ((at(n_ - 2, 2, {"AS", "OS"}) || at(n_ - 1, 1, {"A", "O"})) && at(i - 1, 4, {"ALLE"}));
				if (spanish) {
					add("L", "");
				} else {
					add("L");
				}
				return i + 2;
			}
			add("L");
			return i + 1;
		}

		[[nodiscard]] bool m_is_doubled(int i) const {
			if (ch(i + 1) == 'M') {
				return true;
			}
			return at(i - 1, 3, {"UMB"}) && (i + 1 == n_ - 1 || at(i + 2, 2, {"ER"}));
		}

		int on_r(int i) {
			// French final "-ier": silent in primary.
			if (i == n_ - 1 && !slavo_germanic_ && at(i - 2, 2, {"IE"}) && !at(i - 4, 2, {"ME", "MA"})) {
				add("", "R");
			} else {
				add("R");
			}
			return ch(i + 1) == 'R' ? i + 2 : i + 1;
		}

		int on_s(int i) {
			if (at(i - 1, 3, {"ISL", "YSL"})) {
				return i + 1;
			}
			if (i == 0 && at(i, 5, {"SUGAR"})) {
				add("X", "S");
				return i + 1;
			}
			if (at(i, 2, {"SH"})) {
				if (at(i + 1, 4, {"HEIM", "HOEK", "HOLM", "HOLZ"})) {
					add("S");
				} else {
					add("X");
				}
				return i + 2;
			}
			if (at(i, 3, {"SIO", "SIA"}) || at(i, 4, {"SIAN"})) {
				if (slavo_germanic_) {
					add("S");
				} else {
					add("S", "X");
				}
				return i + 3;
			}
			// "smith" vs "schmidt", "snider" vs "schneider", Slavic "sz".
			if ((i == 0 && at(i + 1, 1, {"M", "N", "L", "W"})) || at(i + 1, 1, {"Z"})) {
				add("S", "X");
				return at(i + 1, 1, {"Z"}) ? i + 2 : i + 1;
			}
			if (at(i, 2, {"SC"})) {
				if (ch(i + 2) == 'H') {
					if (at(i + 3, 2, {"OO", "ER", "EN", "UY", "ED", "EM"})) {
						if (at(i + 3, 2, {"ER", "EN"})) {
							add("X", "SK");
						} else {
							add("SK");
						}
					} else if (i == 0 && !vowel(3) && ch(3) != 'W') {
						add("X", "S");
					} else {
						add("X");
					}
				} else if (at(i + 2, 1, {"I", "E", "Y"})) {
					add("S");
				} else {
					add("SK");
				}
				return i + 3;
			}
			if (i == n_ - 1 && at(i - 2, 2, {"AI", "OI"})) {
				add("", "S");
			} else {
				add("S");
			}
			return at(i + 1, 1, {"S", "Z"}) ? i + 2 : i + 1;
		}

		int on_t(int i) {
			if (at(i, 4, {"TION"}) || at(i, 3, {"TIA", "TCH"})) {
				add("X");
				return i + 3;
			}
			if (at(i, 2, {"TH"}) || at(i, 3, {"TTH"})) {
				if (at(i + 2, 2, {"OM", "AM"}) || germanic_prefix()) {
					add("T");
				} else {
					add("0", "T");
				}
				return i + 2;
			}
			add("T");
			return at(i + 1, 1, {"T", "D"}) ? i + 2 : i + 1;
		}

		int on_w(int i) {
			if (at(i, 2, {"WR"})) {
				add("R");
				return i + 2;
			}
			if (i == 0 && (vowel(i + 1) || at(i, 2, {"WH"}))) {
				if (vowel(i + 1)) {
					add("A", "F");
				} else {
					add("A");
				}
				return i + 1;
			}
			if ((i == n_ - 1 && vowel(i - 1)) || at(i - 1, 5, {"EWSKI", "EWSKY", "OWSKI", "OWSKY"}) ||
			    at(0, 3, {"SCH"})) {
				add("", "F");
				return i + 1;
			}
			if (at(i, 4, {"WICZ", "WITZ"})) {
				add("TS", "FX");
				return i + 4;
			}
			return i + 1;
		}

		int on_x(int i) {
			if (i == 0) {
				add("S");
				return i + 1;
			}
			if (!(i == n_ - 1 && (at(i - 3, 3, {"IAU", "EAU"}) || at(i - 2, 2, {"AU", "OU"})))) {
				add("KS");
			}
			return at(i + 1, 1, {"C", "X"}) ? i + 2 : i + 1;
		}

		int on_z(int i) {
			if (ch(i + 1) == 'H') {
				add("J");
				return i + 2;
			}
			if (at(i + 1, 2, {"ZO", "ZI", "ZA"}) || (slavo_germanic_ && i > 0 && ch(i - 1) != 'T')) {
				add("S", "TS");
			} else {
				add("S");
			}
			return ch(i + 1) == 'Z' ? i + 2 : i + 1;
		}

		std::string v_;
		int n_ = 0;
		std::size_t max_;
		bool slavo_germanic_ = false;
		std::string primary_;
		std::string alternate_;
	};

	std::size_t max_length_;
};

inline MetaphoneCodes double_metaphone(std::string_view s, std::size_t max_length = 4) {
	return DoubleMetaphone(max_length).encode(s);
}

} // namespace poplink
