#pragma once

#include "poplink/certificate_graph.hpp"
#include "poplink/constraints.hpp"
#include "poplink/errors.hpp"
#include "poplink/match_set.hpp"
#include "poplink/parallel.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

namespace poplink {

enum class GroupMethod : std::uint8_t { Maximum, Average, GroupSize, GroupBipartite, Combined };

inline constexpr std::array<GroupMethod, 5> kGroupMethods = {GroupMethod::Maximum, GroupMethod::Average,
                                                             GroupMethod::GroupSize, GroupMethod::GroupBipartite,
                                                             GroupMethod::Combined};

inline std::string_view to_string(GroupMethod m) {
	switch (m) {
	case GroupMethod::Maximum:
		return "maximum";
	case GroupMethod::Average:
		return "average";
	case GroupMethod::GroupSize:
		return "group_size";
	case GroupMethod::GroupBipartite:
		return "group_bipartite";
	case GroupMethod::Combined:
		return "combined";
	}
	return "?";
}

inline GroupMethod parse_group_method(std::string_view s) {
	for (auto m : kGroupMethods) {
		if (s == to_string(m)) {
			return m;
		}
	}
	throw ConfigError("unknown group method '" + std::string(s) + "'");
}

struct GroupScores {
	double max = 0.0;
	double avr = 0.0;
	double size = 0.0;
	double grp = 0.0;
	double comb = 0.0;

	[[nodiscard]] double get(GroupMethod m) const {
		switch (m) {
		case GroupMethod::Maximum:
			return max;
		case GroupMethod::Average:
			return avr;
		case GroupMethod::GroupSize:
			return size;
		case GroupMethod::GroupBipartite:
			return grp;
		case GroupMethod::Combined:
			return comb;
		}
		return 0.0;
	}
};

/// The five scores for a certificate pair of sizes n1 and n2 bridged by the
/// link scores `s`. Before constraints one person may carry several links,
/// so size and bipartite scores are clamped to 1. With `saturate` a link
/// count at or above n1 + n2 gives a bipartite score of 1 instead of an
/// error.
inline GroupScores group_scores(std::size_t n1, std::size_t n2, const std::vector<double> &s,
                                bool saturate = false) {
	if (s.empty()) {
		throw IntegrityError("group scores need at least one link");
	}
	const bool degenerate = s.size() >= n1 + n2;
	if (degenerate && !saturate) {
		throw IntegrityError("more links than the two certificates can carry");
	}
	const double k = static_cast<double>(s.size());
	const double sum = std::accumulate(s.begin(), s.end(), 0.0);
	GroupScores g;
	g.max = *std::max_element(s.begin(), s.end());
	g.avr = sum / k;
	g.size = std::min(1.0, k / static_cast<double>(std::max(n1, n2)));
	g.grp = degenerate ? 1.0 : std::min(1.0, sum / (static_cast<double>(n1 + n2) - k));
	g.comb = (g.max + g.avr + g.size + g.grp) / 4.0;
	return g;
}

inline GroupScores group_scores(const Certificate &c1, const Certificate &c2, const std::vector<double> &s,
                                bool saturate = false) {
	return group_scores(c1.members.size(), c2.members.size(), s, saturate);
}

/// M_G: one score per (edge, linkage type) the graph supports, optionally
/// followed by the cardinality constraints.
inline CertificateMatchSet score_group(const CertificateGraph &g, const RecordStore &store, GroupMethod method,
                                       const std::vector<LinkageType> &types, const std::vector<EdgeMatch> &matched,
                                       const LinkConstraintTable *constraints = nullptr,
                                       AssignmentMode mode = AssignmentMode::Greedy, std::size_t workers = 1) {
	CertificateMatchSet m;
	m.method = std::string(to_string(method));
	m.entries = parallel_collect<MatchEntry>(matched.size(), workers, [&](std::size_t i, std::vector<MatchEntry> &out) {
		const auto &em = matched[i];
		const auto &e = g.edge(em.edge);
		std::vector<double> s;
		s.reserve(e.links.size());
		for (const auto &l : e.links) {
			s.push_back(l.score);
		}
		MatchEntry entry;
		entry.c1 = e.a;
		entry.c2 = e.b;
		entry.linkage_type = em.linkage_type;
		entry.score = io::quantize(group_scores(store.certificate(e.a), store.certificate(e.b), s, true).get(method));
		out.push_back(entry);
	});
	m.sort();
	if (constraints) {
		return enforce(m, store, types, *constraints, mode);
	}
	return m;
}

} // namespace poplink
