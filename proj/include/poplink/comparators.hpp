#pragma once

#include "poplink/errors.hpp"
#include "poplink/text.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

namespace poplink {

/// Plain Levenshtein distance (unit cost insert/delete/substitute).
inline std::size_t edit_distance(std::string_view a, std::string_view b) {
	if (a.size() < b.size()) {
		std::swap(a, b);
	}
	std::vector<std::size_t> row(b.size() + 1);
	std::iota(row.begin(), row.end(), std::size_t{0});
	for (std::size_t i = 1; i <= a.size(); ++i) {
		std::size_t diag = row[0];
		row[0] = i;
		for (std::size_t j = 1; j <= b.size(); ++j) {
			std::size_t up = row[j];
			std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
			row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + cost});
			diag = up;
		}
	}
	return row[b.size()];
}

/// 1 - editdist / max length; two empty strings are identical.
inline double levenshtein_sim(std::string_view a, std::string_view b) {
	auto longest = std::max(a.size(), b.size());
	if (longest == 0) {
		return 1.0;
	}
	return 1.0 - static_cast<double>(edit_distance(a, b)) / static_cast<double>(longest);
}

inline double jaro_sim(std::string_view a, std::string_view b) {
	if (a.empty() && b.empty()) {
		return 1.0;
	}
	if (a.empty() || b.empty()) {
		return 0.0;
	}
	const std::size_t window = std::max<std::size_t>(std::max(a.size(), b.size()) / 2, 1) - 1;
	std::vector<char> a_hit(a.size(), 0);
	std::vector<char> b_hit(b.size(), 0);
	std::size_t matches = 0;
	for (std::size_t i = 0; i < a.size(); ++i) {
		std::size_t lo = i > window ? i - window : 0;
		std::size_t hi = std::min(i + window + 1, b.size());
		for (std::size_t j = lo; j < hi; ++j) {
			if (!b_hit[j] && a[i] == b[j]) {
				a_hit[i] = b_hit[j] = 1;
				++matches;
				break;
			}
		}
	}
	if (matches == 0) {
		return 0.0;
	}
	std::size_t half_transpositions = 0;
	for (std::size_t i = 0, j = 0; i < a.size(); ++i) {
		if (!a_hit[i]) {
			continue;
		}
		while (!b_hit[j]) {
			++j;
		}
		if (a[i] != b[j]) {
			++half_transpositions;
		}
		++j;
	}
	const double m = static_cast<double>(matches);
	const double t = static_cast<double>(half_transpositions / 2);
	return (m / static_cast<double>(a.size()) + m / static_cast<double>(b.size()) + (m - t) / m) / 3.0;
}

/// Jaro similarity boosted by the common prefix (at most `prefix_cap`
/// characters). prefix_weight must lie in [0, 0.25] so the result stays <= 1.
/// As in Winkler's original, only Jaro scores above `boost_threshold` get
/// the boost.
inline double jaro_winkler_sim(std::string_view a, std::string_view b, double prefix_weight = 0.1,
                               std::size_t prefix_cap = 4, double boost_threshold = 0.7) {
	if (!(prefix_weight >= 0.0 && prefix_weight <= 0.25)) {
		throw ConfigError("jaro_winkler prefix weight must be in [0, 0.25]");
	}
	double j = jaro_sim(a, b);
	if (j <= boost_threshold) {
		return j;
	}
	std::size_t prefix = 0;
	std::size_t limit = std::min({a.size(), b.size(), prefix_cap});
	while (prefix < limit && a[prefix] == b[prefix]) {
		++prefix;
	}
	return j + static_cast<double>(prefix) * prefix_weight * (1.0 - j);
}

/// Linear decay of the year difference, zero at d_max and beyond.
inline double year_diff_sim(int y1, int y2, int d_max) {
	if (d_max <= 0) {
		throw ConfigError("year_diff d_max must be positive");
	}
	double d = std::abs(static_cast<double>(y1) - static_cast<double>(y2));
	return std::max(0.0, 1.0 - d / static_cast<double>(d_max));
}

inline double exact_sim(std::string_view a, std::string_view b) {
	return text::iequals(a, b) ? 1.0 : 0.0;
}

enum class ComparatorKind : std::uint8_t { Exact, Levenshtein, JaroWinkler, YearDiff };

inline std::string_view to_string(ComparatorKind k) {
	switch (k) {
	case ComparatorKind::Exact:
		return "exact";
	case ComparatorKind::Levenshtein:
		return "levenshtein";
	case ComparatorKind::JaroWinkler:
		return "jaro_winkler";
	case ComparatorKind::YearDiff:
		return "year_diff";
	}
	return "?";
}

struct ComparatorSpec {
	ComparatorKind kind = ComparatorKind::Exact;
	double prefix_weight = 0.1;
	std::size_t prefix_cap = 4;
	double boost_threshold = 0.7;
	int d_max = 10;

	static ComparatorSpec parse(std::string_view kind_name) {
		for (auto k : {ComparatorKind::Exact, ComparatorKind::Levenshtein, ComparatorKind::JaroWinkler,
		               ComparatorKind::YearDiff}) {
			if (kind_name == to_string(k)) {
				return ComparatorSpec{k};
			}
		}
		throw ConfigError("unknown comparator '" + std::string(kind_name) + "'");
	}

	void validate() const {
		if (kind == ComparatorKind::JaroWinkler && !(prefix_weight >= 0.0 && prefix_weight <= 0.25)) {
			throw ConfigError("jaro_winkler prefix weight must be in [0, 0.25]");
		}
		if (kind == ComparatorKind::YearDiff && d_max <= 0) {
			throw ConfigError("year_diff d_max must be positive");
		}
	}

	/// Values that do not parse as years compare as 0 under year_diff.
	[[nodiscard]] double compare(std::string_view a, std::string_view b) const {
		switch (kind) {
		case ComparatorKind::Exact:
			return exact_sim(a, b);
		case ComparatorKind::Levenshtein:
			return levenshtein_sim(a, b);
		case ComparatorKind::JaroWinkler:
			return jaro_winkler_sim(a, b, prefix_weight, prefix_cap, boost_threshold);
		case ComparatorKind::YearDiff: {
			auto ya = text::parse_int(a);
			auto yb = text::parse_int(b);
			if (!ya || !yb) {
				return 0.0;
			}
			return year_diff_sim(*ya, *yb, d_max);
		}
		}
		return 0.0;
	}
};

} // namespace poplink
