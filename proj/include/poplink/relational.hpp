#pragma once

#include "poplink/certificate_graph.hpp"
#include "poplink/constraints.hpp"
#include "poplink/errors.hpp"
#include "poplink/match_set.hpp"
#include "poplink/parallel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace poplink {

enum class RelationalMethod : std::uint8_t {
	Jaccard,
	MultiJaccard,
	Average,
	MultiAverage,
	Maximum,
	AdarAdamic,
	MultiAdarAdamic
};

inline constexpr std::array<RelationalMethod, 7> kRelationalMethods = {
    RelationalMethod::Jaccard,    RelationalMethod::MultiJaccard, RelationalMethod::Average,
    RelationalMethod::MultiAverage, RelationalMethod::Maximum,    RelationalMethod::AdarAdamic,
    RelationalMethod::MultiAdarAdamic};

inline std::string_view to_string(RelationalMethod m) {
	switch (m) {
	case RelationalMethod::Jaccard:
		return "jaccard";
	case RelationalMethod::MultiJaccard:
		return "multi_jaccard";
	case RelationalMethod::Average:
		return "average";
	case RelationalMethod::MultiAverage:
		return "multi_average";
	case RelationalMethod::Maximum:
		return "maximum";
	case RelationalMethod::AdarAdamic:
		return "adar_adamic";
	case RelationalMethod::MultiAdarAdamic:
		return "multi_adar_adamic";
	}
	return "?";
}

inline RelationalMethod parse_relational_method(std::string_view s) {
	for (auto m : kRelationalMethods) {
		if (s == to_string(m)) {
			return m;
		}
	}
	throw ConfigError("unknown relational method '" + std::string(s) + "'");
}

/// Adar/Adamic weight of a neighbor from its full degree.
inline double adar_weight(std::size_t degree) {
	if (degree <= 1) {
		return 1.0;
	}
	return 1.0 / std::log(1.0 + static_cast<double>(degree));
}

/// Per-vertex sums over a filtered neighborhood: count, multiplicity,
/// Adar weight and Adar weight times multiplicity.
struct NeighborTotals {
	double count = 0, mult = 0, adar = 0, adar_mult = 0;
};

inline NeighborTotals neighbor_totals(const CertificateGraph &g, CertificateIndex c, NeighborFilter filter) {
	NeighborTotals t;
	for (const auto &a : g.adjacent(c)) {
		if (!filter.admits(g.type(a.neighbor))) {
			continue;
		}
		const double m = static_cast<double>(g.edge(a.edge).multiplicity());
		const double u = adar_weight(g.degree(a.neighbor));
		t.count += 1;
		t.mult += m;
		t.adar += u;
		t.adar_mult += u * m;
	}
	return t;
}

namespace relational_detail {

// Scores for c1, c2 given their totals. `small` is the shorter adjacency
// list; `other(n)` returns the edge from the other endpoint to n, or null.
// `weight(n)` is the Adar weight of n.
template <class Lookup, class Weight>
std::array<double, 7> pair_scores(const CertificateGraph &g, CertificateIndex c1, CertificateIndex c2,
                                  NeighborFilter filter, NeighborTotals t1, NeighborTotals t2,
                                  const std::vector<CertificateGraph::Adjacent> &small, Lookup &&other,
                                  Weight &&weight) {
	// drop the pair itself from each side's totals
	auto drop = [&](NeighborTotals &t, CertificateIndex self, CertificateIndex o) {
		if (!filter.admits(g.type(o))) {
			return;
		}
		if (auto e = g.find_edge(self, o)) {
			const double m = static_cast<double>(g.edge(*e).multiplicity());
			const double u = adar_weight(g.degree(o));
			t.count -= 1;
			t.mult -= m;
			t.adar -= u;
			t.adar_mult -= u * m;
		}
	};
	drop(t1, c1, c2);
	drop(t2, c2, c1);

	double k = 0, sum_min = 0, adar_common = 0, adar_min = 0;
	double avg_sum = 0, multi_avg_sum = 0, maximum = 0;
	for (const auto &a : small) {
		const CertificateIndex n = a.neighbor;
		if (n == c1 || n == c2 || !filter.admits(g.type(n))) {
			continue;
		}
		const CertificateEdge *o = other(n);
		if (!o) {
			continue;
		}
		const auto &e = g.edge(a.edge);
		const double m1 = static_cast<double>(e.multiplicity());
		const double m2 = static_cast<double>(o->multiplicity());
		const double u = weight(n);
		k += 1;
		sum_min += std::min(m1, m2);
		adar_common += u;
		adar_min += u * std::min(m1, m2);
		avg_sum += (e.max + o->max) / 2.0;
		multi_avg_sum += (e.sum + o->sum) / (m1 + m2);
		maximum = std::max({maximum, e.max, o->max});
	}
	const double uni = t1.count + t2.count - k;
	const double multi_max = t1.mult + t2.mult - sum_min;
	const double adar_den = t1.adar + t2.adar - adar_common;
	const double madar_den = t1.adar_mult + t2.adar_mult - adar_min;
	auto ratio = [](double a, double b) { return b > 0.0 ? std::clamp(a / b, 0.0, 1.0) : 0.0; };
	return {ratio(k, uni),
	        ratio(sum_min, multi_max),
	        k > 0 ? avg_sum / k : 0.0,
	        k > 0 ? multi_avg_sum / k : 0.0,
	        maximum,
	        ratio(adar_common, adar_den),
	        ratio(adar_min, madar_den)};
}

} // namespace relational_detail

/// All seven scores for one certificate pair. Both neighborhoods are
/// filtered and exclude c1 and c2 themselves. Union terms come from vertex
/// totals, so only the common neighbors need a visit.
inline std::array<double, 7> relational_scores(const CertificateGraph &g, CertificateIndex c1, CertificateIndex c2,
                                               NeighborFilter filter = NeighborFilter::all()) {
	const auto &n1 = g.adjacent(c1);
	const auto &n2 = g.adjacent(c2);
	const bool swap = n2.size() < n1.size();
	const auto &small = swap ? n2 : n1;
	const CertificateIndex big = swap ? c1 : c2;
	return relational_detail::pair_scores(
	    g, c1, c2, filter, neighbor_totals(g, c1, filter), neighbor_totals(g, c2, filter), small,
	    [&](CertificateIndex n) -> const CertificateEdge * {
		    auto e = g.find_edge(big, n);
		    return e ? &g.edge(*e) : nullptr;
	    },
	    [&](CertificateIndex n) { return adar_weight(g.degree(n)); });
}

/// All seven scores for every (edge, linkage type) in `matched`, aligned with
/// it. Pairs are grouped by their higher-degree endpoint, whose adjacency is
/// scattered into a dense table once; the other endpoint's list is walked.
inline std::vector<std::array<double, 7>> relational_score_table(const CertificateGraph &g,
                                                                 const std::vector<LinkageType> &types,
                                                                 const std::vector<EdgeMatch> &matched,
                                                                 std::size_t workers = 1) {
	const std::size_t nv = g.vertex_count();
	auto hub_of = [&](const CertificateEdge &e) {
		return g.degree(e.b) > g.degree(e.a) ? e.b : e.a;
	};
	std::vector<std::vector<std::uint32_t>> by_hub(nv);
	for (std::size_t i = 0; i < matched.size(); ++i) {
		by_hub[hub_of(g.edge(matched[i].edge))].push_back(static_cast<std::uint32_t>(i));
	}
	std::vector<NeighborFilter> filters;
	std::vector<std::vector<NeighborTotals>> totals;
	for (const auto &t : types) {
		if (std::find(filters.begin(), filters.end(), t.neighbors) != filters.end()) {
			continue;
		}
		filters.push_back(t.neighbors);
		totals.push_back(parallel_collect<NeighborTotals>(nv, workers, [&](std::size_t c, std::vector<NeighborTotals> &out) {
			out.push_back(neighbor_totals(g, static_cast<CertificateIndex>(c), t.neighbors));
		}));
	}
	auto totals_of = [&](NeighborFilter f) -> const std::vector<NeighborTotals> & {
		return totals[static_cast<std::size_t>(std::find(filters.begin(), filters.end(), f) - filters.begin())];
	};

	std::vector<double> weights(nv);
	for (std::size_t c = 0; c < nv; ++c) {
		weights[c] = adar_weight(g.degree(static_cast<CertificateIndex>(c)));
	}

	using Scored = std::pair<std::uint32_t, std::array<double, 7>>;
	auto scored = parallel_collect<Scored>(nv, workers, [&](std::size_t h, std::vector<Scored> &out) {
		const auto &items = by_hub[h];
		if (items.empty()) {
			return;
		}
		thread_local std::vector<const CertificateEdge *> dense;
		dense.assign(nv, nullptr);
		const auto hub = static_cast<CertificateIndex>(h);
		for (const auto &a : g.adjacent(hub)) {
			dense[a.neighbor] = &g.edge(a.edge);
		}
		for (auto i : items) {
			const auto &e = g.edge(matched[i].edge);
			const CertificateIndex other = e.a == hub ? e.b : e.a;
			const auto filter = types.at(matched[i].linkage_type).neighbors;
			const auto &tot = totals_of(filter);
			out.emplace_back(i, relational_detail::pair_scores(g, e.a, e.b, filter, tot[e.a], tot[e.b],
			                                                   g.adjacent(other),
			                                                   [&](CertificateIndex n) { return dense[n]; },
			                                                   [&](CertificateIndex n) { return weights[n]; }));
		}
	});
	std::vector<std::array<double, 7>> table(matched.size());
	for (auto &[i, s] : scored) {
		table[i] = s;
	}
	return table;
}

inline double relational_score(const CertificateGraph &g, RelationalMethod m, CertificateIndex c1,
                               CertificateIndex c2, NeighborFilter filter = NeighborFilter::all()) {
	return relational_scores(g, c1, c2, filter)[static_cast<std::size_t>(m)];
}

inline double rel_jaccard(const CertificateGraph &g, CertificateIndex c1, CertificateIndex c2,
                          NeighborFilter f = NeighborFilter::all()) {
	return relational_score(g, RelationalMethod::Jaccard, c1, c2, f);
}
inline double rel_multi_jaccard(const CertificateGraph &g, CertificateIndex c1, CertificateIndex c2,
                                NeighborFilter f = NeighborFilter::all()) {
	return relational_score(g, RelationalMethod::MultiJaccard, c1, c2, f);
}
inline double rel_average(const CertificateGraph &g, CertificateIndex c1, CertificateIndex c2,
                          NeighborFilter f = NeighborFilter::all()) {
	return relational_score(g, RelationalMethod::Average, c1, c2, f);
}
inline double rel_multi_average(const CertificateGraph &g, CertificateIndex c1, CertificateIndex c2,
                                NeighborFilter f = NeighborFilter::all()) {
	return relational_score(g, RelationalMethod::MultiAverage, c1, c2, f);
}
inline double rel_maximum(const CertificateGraph &g, CertificateIndex c1, CertificateIndex c2,
                          NeighborFilter f = NeighborFilter::all()) {
	return relational_score(g, RelationalMethod::Maximum, c1, c2, f);
}
inline double rel_adar_adamic(const CertificateGraph &g, CertificateIndex c1, CertificateIndex c2,
                              NeighborFilter f = NeighborFilter::all()) {
	return relational_score(g, RelationalMethod::AdarAdamic, c1, c2, f);
}
inline double rel_multi_adar_adamic(const CertificateGraph &g, CertificateIndex c1, CertificateIndex c2,
                                    NeighborFilter f = NeighborFilter::all()) {
	return relational_score(g, RelationalMethod::MultiAdarAdamic, c1, c2, f);
}

/// M_R for one method from a precomputed score table, optionally followed
/// by the cardinality constraints.
inline CertificateMatchSet relational_match_set(const CertificateGraph &g, const RecordStore &store,
                                                RelationalMethod method, const std::vector<LinkageType> &types,
                                                const std::vector<EdgeMatch> &matched,
                                                const std::vector<std::array<double, 7>> &table,
                                                const LinkConstraintTable *constraints = nullptr,
                                                AssignmentMode mode = AssignmentMode::Greedy) {
	CertificateMatchSet m;
	m.method = std::string(to_string(method));
	m.entries.reserve(matched.size());
	for (std::size_t i = 0; i < matched.size(); ++i) {
		const auto &e = g.edge(matched[i].edge);
		MatchEntry entry;
		entry.c1 = e.a;
		entry.c2 = e.b;
		entry.linkage_type = matched[i].linkage_type;
		entry.score = io::quantize(table[i][static_cast<std::size_t>(method)]);
		m.entries.push_back(entry);
	}
	m.sort();
	if (constraints) {
		return enforce(m, store, types, *constraints, mode);
	}
	return m;
}

/// M_R: one score per (edge, linkage type) the graph supports, optionally
/// followed by the cardinality constraints.
inline CertificateMatchSet score_relational(const CertificateGraph &g, const RecordStore &store,
                                            RelationalMethod method, const std::vector<LinkageType> &types,
                                            const std::vector<EdgeMatch> &matched,
                                            const LinkConstraintTable *constraints = nullptr,
                                            AssignmentMode mode = AssignmentMode::Greedy, std::size_t workers = 1) {
	const auto table = relational_score_table(g, types, matched, workers);
	return relational_match_set(g, store, method, types, matched, table, constraints, mode);
}

} // namespace poplink
