#pragma once

#include "poplink/blocking.hpp"
#include "poplink/comparators.hpp"
#include "poplink/core_model.hpp"
#include "poplink/errors.hpp"
#include "poplink/io.hpp"
#include "poplink/parallel.hpp"
#include "poplink/record_store.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace poplink {

enum class MissingValuePolicy : std::uint8_t { IncludeAsZero, ExcludeAttribute };

inline std::string_view to_string(MissingValuePolicy p) {
	return p == MissingValuePolicy::IncludeAsZero ? "include_as_zero" : "exclude_attribute";
}

inline MissingValuePolicy parse_missing_value_policy(std::string_view s) {
	if (s == "include_as_zero") {
		return MissingValuePolicy::IncludeAsZero;
	}
	if (s == "exclude_attribute") {
		return MissingValuePolicy::ExcludeAttribute;
	}
	throw ConfigError("unknown missing-value policy '" + std::string(s) + "'");
}

enum class WeightingMode : std::uint8_t { Uniform, Trained };

inline std::string_view to_string(WeightingMode m) { return m == WeightingMode::Uniform ? "uniform" : "trained"; }

inline WeightingMode parse_weighting_mode(std::string_view s) {
	if (s == "uniform") {
		return WeightingMode::Uniform;
	}
	if (s == "trained") {
		return WeightingMode::Trained;
	}
	throw ConfigError("unknown weighting mode '" + std::string(s) + "'");
}

struct AttributeComparator {
	std::size_t attribute = 0;
	ComparatorSpec spec;
};

/// Weighted mean of per-attribute similarities over two attribute vectors.
/// `weights` is parallel to `comparators`. A side with no compared values at
/// all scores 0.
inline double record_pair_sim(const std::vector<std::optional<std::string>> &a,
                              const std::vector<std::optional<std::string>> &b,
                              const std::vector<AttributeComparator> &comparators, const std::vector<double> &weights,
                              MissingValuePolicy mv) {
	double num = 0.0;
	double den = 0.0;
	bool any_a = false;
	bool any_b = false;
	for (std::size_t i = 0; i < comparators.size(); ++i) {
		const auto &c = comparators[i];
		const auto &va = a[c.attribute];
		const auto &vb = b[c.attribute];
		any_a = any_a || va.has_value();
		any_b = any_b || vb.has_value();
		double w = weights[i];
		if (!va || !vb) {
			if (mv == MissingValuePolicy::IncludeAsZero) {
				den += w;
			}
			continue;
		}
		num += w * c.spec.compare(*va, *vb);
		den += w;
	}
	if (!any_a || !any_b || den <= 0.0) {
		return 0.0;
	}
	return std::clamp(num / den, 0.0, 1.0);
}

inline double record_pair_sim(const IndividualRecord &a, const IndividualRecord &b,
                              const std::vector<AttributeComparator> &comparators, const std::vector<double> &weights,
                              MissingValuePolicy mv) {
	return record_pair_sim(a.attributes, b.attributes, comparators, weights, mv);
}

/// The configured comparator set with its weights and missing-value policy.
struct RecordScorer {
	std::vector<AttributeComparator> comparators;
	std::vector<double> weights; // parallel to comparators
	MissingValuePolicy missing = MissingValuePolicy::ExcludeAttribute;

	void validate() const {
		if (weights.size() != comparators.size()) {
			throw ConfigError("one weight per compared attribute required");
		}
		for (double w : weights) {
			if (!std::isfinite(w) || w < 0.0) {
				throw ConfigError("attribute weights must be finite and non-negative");
			}
		}
		for (const auto &c : comparators) {
			c.spec.validate();
		}
	}

	[[nodiscard]] double operator()(const RecordStore &store, RecordIndex a, RecordIndex b) const {
		return record_pair_sim(store.record(a), store.record(b), comparators, weights, missing);
	}
};

struct Link {
	RecordIndex a = 0; // a < b
	RecordIndex b = 0;
	double score = 0.0;

	friend bool operator==(const Link &, const Link &) = default;
};

/// Scored record pairs at or above s_m, in (a, b) order. Scores are
/// quantized to the six decimals of the stage file.
struct LinkSet {
	double s_m = 0.4;
	std::vector<Link> links;

	[[nodiscard]] std::size_t size() const { return links.size(); }

	/// Entries with score >= threshold (threshold >= s_m for a true subset).
	[[nodiscard]] LinkSet filtered(double threshold) const {
		LinkSet out;
		out.s_m = std::max(s_m, threshold);
		for (const auto &l : links) {
			if (l.score >= threshold) {
				out.links.push_back(l);
			}
		}
		return out;
	}
};

inline void validate_threshold(double s, const char *name) {
	if (!(s >= 0.0 && s <= 1.0)) {
		throw ConfigError(std::string(name) + " must lie in [0, 1]");
	}
}

inline LinkSet build_link_set(const RecordStore &store, const CandidateSet &candidates, const RecordScorer &scorer,
                              double s_m, std::size_t workers = 1) {
	validate_threshold(s_m, "s_m");
	LinkSet out;
	out.s_m = s_m;
	out.links = parallel_collect<Link>(candidates.size(), workers, [&](std::size_t i, std::vector<Link> &part) {
		auto [a, b] = candidates[i];
		double s = io::quantize(scorer(store, a, b));
		if (s >= s_m) {
			part.push_back({a, b, s});
		}
	});
	return out;
}

inline void write_link_set(const LinkSet &links, const RecordStore &store, std::ostream &out) {
	io::write_row(out, {"record_id_1", "record_id_2", "similarity"});
	for (const auto &l : links.links) {
		io::write_row(out, {store.record(l.a).record_id, store.record(l.b).record_id, io::format_score(l.score)});
	}
}

inline LinkSet read_link_set(const std::filesystem::path &path, const RecordStore &store, double s_m) {
	auto rows = io::read_tsv(path);
	LinkSet out;
	out.s_m = s_m;
	for (std::size_t i = 1; i < rows.size(); ++i) {
		const auto &row = rows[i];
		if (row.size() < 3) {
			throw IntegrityError(path.string() + ": short row " + std::to_string(i + 1));
		}
		auto a = store.find_record(row[0]);
		auto b = store.find_record(row[1]);
		auto s = text::parse_double(row[2]);
		if (!a || !b || !s) {
			throw IntegrityError(path.string() + ": dangling record id or bad score on line " + std::to_string(i + 1));
		}
		if (*a > *b) {
			std::swap(a, b);
		}
		out.links.push_back({*a, *b, io::quantize(*s)});
	}
	std::sort(out.links.begin(), out.links.end(),
	          [](const Link &x, const Link &y) { return std::tie(x.a, x.b) < std::tie(y.a, y.b); });
	return out;
}

/// Contrast-of-means attribute weights. Matched pairs are record pairs that
/// share an entity id across the given gold certificate pairs; without
/// entity ids the best-scoring valid-role record pair of each gold
/// certificate pair stands in. An equal number of random record pairs from
/// distinct certificates (and, where known, distinct entities) is the
/// non-match sample. weight = max(0, mean_match - mean_random), rescaled to
/// mean 1; no contrast at all falls back to uniform weights.
inline std::vector<double> train_weights(const RecordStore &store,
                                         const std::vector<std::pair<CertificateIndex, CertificateIndex>> &gold,
                                         const std::vector<AttributeComparator> &comparators,
                                         const RolePairSet &role_pairs, std::size_t sample_size,
                                         std::uint64_t seed) {
	if (gold.empty()) {
		throw ConfigError("trained weighting needs gold links; use uniform weighting instead");
	}
	if (sample_size == 0) {
		throw ConfigError("trained weighting needs a positive sample size");
	}
	const std::vector<double> uniform(comparators.size(), 1.0);
	std::vector<std::pair<RecordIndex, RecordIndex>> matched;
	for (auto [c1, c2] : gold) {
		const auto &m1 = store.certificate(c1).members;
		const auto &m2 = store.certificate(c2).members;
		std::optional<std::pair<RecordIndex, RecordIndex>> best;
		double best_score = -1.0;
		for (auto r1 : m1) {
			for (auto r2 : m2) {
				const auto &a = store.record(r1);
				const auto &b = store.record(r2);
				if (a.entity_id && b.entity_id) {
					if (*a.entity_id == *b.entity_id) {
						matched.emplace_back(r1, r2);
					}
					continue;
				}
				if (!is_valid_role_pair(a.role, b.role, role_pairs)) {
					continue;
				}
				double s = record_pair_sim(a, b, comparators, uniform, MissingValuePolicy::ExcludeAttribute);
				if (s > best_score) {
					best_score = s;
					best = std::make_pair(r1, r2);
				}
			}
		}
		if (best) {
			matched.push_back(*best);
		}
	}
	if (matched.empty()) {
		throw ConfigError("gold links yield no matched record pairs; use uniform weighting instead");
	}
	std::mt19937_64 rng(seed);
	if (matched.size() > sample_size) {
		std::shuffle(matched.begin(), matched.end(), rng);
		matched.resize(sample_size);
	}
	std::vector<std::pair<RecordIndex, RecordIndex>> random;
	if (store.record_count() >= 2) {
		std::uniform_int_distribution<RecordIndex> pick(0, static_cast<RecordIndex>(store.record_count() - 1));
		std::size_t attempts = 0;
		while (random.size() < matched.size() && attempts < 100 * matched.size()) {
			++attempts;
			RecordIndex a = pick(rng);
			RecordIndex b = pick(rng);
			if (store.certificate_of(a) == store.certificate_of(b)) {
				continue;
			}
			const auto &ea = store.record(a).entity_id;
			const auto &eb = store.record(b).entity_id;
			if (ea && eb && *ea == *eb) {
				continue;
			}
			random.emplace_back(a, b);
		}
	}
	auto mean_sim = [&](const std::vector<std::pair<RecordIndex, RecordIndex>> &pairs, const AttributeComparator &c) {
		double sum = 0.0;
		std::size_t n = 0;
		for (auto [a, b] : pairs) {
			const auto &va = store.value(a, c.attribute);
			const auto &vb = store.value(b, c.attribute);
			if (va && vb) {
				sum += c.spec.compare(*va, *vb);
				++n;
			}
		}
		return n ? sum / static_cast<double>(n) : 0.0;
	};
	std::vector<double> w(comparators.size());
	double total = 0.0;
	for (std::size_t i = 0; i < comparators.size(); ++i) {
		w[i] = std::max(0.0, mean_sim(matched, comparators[i]) - mean_sim(random, comparators[i]));
		total += w[i];
	}
	if (total <= 0.0) {
		return uniform;
	}
	for (auto &x : w) {
		x = x * static_cast<double>(w.size()) / total;
	}
	return w;
}

} // namespace poplink
