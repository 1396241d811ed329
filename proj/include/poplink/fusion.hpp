#pragma once

#include "poplink/certificate_graph.hpp"
#include "poplink/core_model.hpp"
#include "poplink/errors.hpp"
#include "poplink/io.hpp"
#include "poplink/match_set.hpp"
#include "poplink/record_store.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <tuple>
#include <vector>

namespace poplink {

struct FusionParams {
	double w_r = 0.5;
	double w_g = 0.5;
	double s_t = 0.5;

	void validate() const {
		if (!(w_r >= 0.0 && w_g >= 0.0)) {
			throw ConfigError("fusion weights must be non-negative");
		}
		if (std::abs(w_r + w_g - 1.0) > 1e-9) {
			throw ConfigError("fusion weights must sum to 1");
		}
		if (!(s_t >= 0.0 && s_t <= 1.0)) {
			throw ConfigError("s_t must lie in [0, 1]");
		}
	}
};

/// M_F: entries present in both match sets whose weighted score reaches
/// s_t (inclusive, with a little slack for rounding).
inline CertificateMatchSet fuse(const CertificateMatchSet &m_r, const CertificateMatchSet &m_g,
                                const FusionParams &p) {
	p.validate();
	CertificateMatchSet out;
	out.method = m_r.method + "+" + m_g.method;
	std::size_t i = 0, j = 0;
	while (i < m_r.entries.size() && j < m_g.entries.size()) {
		const auto &r = m_r.entries[i];
		const auto &g = m_g.entries[j];
		if (r.key() < g.key()) {
			++i;
		} else if (g.key() < r.key()) {
			++j;
		} else {
			double s = p.w_r * r.score + p.w_g * g.score;
			if (s >= p.s_t - 1e-12) {
				MatchEntry e = r;
				e.score = io::quantize(s);
				e.relational = r.score;
				e.group = g.score;
				out.entries.push_back(e);
			}
			++i;
			++j;
		}
	}
	return out;
}

/// Certificate pairs scored by their best individual link alone.
inline CertificateMatchSet pairwise_match_set(const CertificateGraph &g, const std::vector<EdgeMatch> &matched) {
	CertificateMatchSet m;
	m.method = "pairwise";
	for (const auto &em : matched) {
		const auto &e = g.edge(em.edge);
		m.entries.push_back({e.a, e.b, em.linkage_type, e.max, 0.0, 0.0});
	}
	m.sort();
	return m;
}

namespace segment_detail {

struct RecordLink {
	RecordIndex a; // a < b
	RecordIndex b;
	double certificate_score;
	double record_score;
};

/// Stronger links sort first; the weakest link is the last one.
inline bool stronger(const RecordLink &x, const RecordLink &y) {
	return std::make_tuple(-x.certificate_score, -x.record_score, x.a, x.b) <
	       std::make_tuple(-y.certificate_score, -y.record_score, y.a, y.b);
}

class DisjointSets {
public:
	explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }
	std::size_t find(std::size_t x) {
		while (parent_[x] != x) {
			parent_[x] = parent_[parent_[x]];
			x = parent_[x];
		}
		return x;
	}
	bool unite(std::size_t a, std::size_t b) {
		a = find(a);
		b = find(b);
		if (a == b) {
			return false;
		}
		parent_[std::max(a, b)] = std::min(a, b);
		return true;
	}

private:
	std::vector<std::size_t> parent_;
};

} // namespace segment_detail

/// Turn matched certificate pairs into life segments. Every match links the
/// records holding its anchor roles (one-to-one within the certificate pair,
/// best individual similarity first); connected records form a segment.
/// Components that break segment rules lose their weakest links until each
/// piece is valid. Records left unlinked become singleton segments.
inline std::vector<LifeSegment> assemble_life_segments(const CertificateMatchSet &m_f, const RecordStore &store,
                                                       const CertificateGraph &g,
                                                       const std::vector<LinkageType> &types,
                                                       const RolePairSet &pairs) {
	using segment_detail::RecordLink;
	std::map<std::pair<RecordIndex, RecordIndex>, RecordLink> by_pair;
	for (const auto &m : m_f.entries) {
		const auto &lt = types.at(m.linkage_type);
		auto o = orient(store, lt, m.c1, m.c2);
		auto edge = g.find_edge(m.c1, m.c2);
		if (!o || !edge) {
			continue;
		}
		const auto &e = g.edge(*edge);
		const bool left_is_lo = o->first == e.a;
		std::vector<EdgeLink> anchors;
		for (const auto &l : e.links) {
			RoleId rl = store.record(left_is_lo ? l.lo : l.hi).role;
			RoleId rr = store.record(left_is_lo ? l.hi : l.lo).role;
			if (rl == lt.left_role && rr == lt.right_role) {
				anchors.push_back(l);
			}
		}
		std::stable_sort(anchors.begin(), anchors.end(),
		                 [](const EdgeLink &x, const EdgeLink &y) { return x.score > y.score; });
		std::vector<RecordIndex> used;
		for (const auto &l : anchors) {
			if (std::find(used.begin(), used.end(), l.lo) != used.end() ||
			    std::find(used.begin(), used.end(), l.hi) != used.end()) {
				continue;
			}
			used.push_back(l.lo);
			used.push_back(l.hi);
			RecordLink link{std::min(l.lo, l.hi), std::max(l.lo, l.hi), m.score, l.score};
			auto [it, inserted] = by_pair.try_emplace({link.a, link.b}, link);
			if (!inserted && segment_detail::stronger(link, it->second)) {
				it->second = link;
			}
		}
	}

	// Removing the weakest links of an invalid component until it falls
	// apart, and recursing on the pieces, yields the largest valid clusters
	// of the strongest-first merge order (validity survives taking subsets).
	// So merge strongest first and freeze a valid cluster as a segment as
	// soon as it would join an invalid one.
	const std::size_t n = store.record_count();
	std::vector<RecordLink> links;
	links.reserve(by_pair.size());
	for (const auto &[k, l] : by_pair) {
		links.push_back(l);
	}
	std::sort(links.begin(), links.end(), segment_detail::stronger);
	segment_detail::DisjointSets ds(n);
	std::vector<std::vector<RecordIndex>> members(n);
	std::vector<char> valid(n, 1);
	for (RecordIndex r = 0; r < n; ++r) {
		members[r].push_back(r);
	}
	std::vector<std::vector<RecordIndex>> groups;
	auto compatible = [&](const std::vector<RecordIndex> &x, const std::vector<RecordIndex> &y) {
		for (auto i : x) {
			const auto ci = store.certificate_of(i);
			const auto ri = store.record(i).role;
			for (auto j : y) {
				if (store.certificate_of(j) == ci || !is_valid_role_pair(ri, store.record(j).role, pairs)) {
					return false;
				}
			}
		}
		return true;
	};
	for (const auto &l : links) {
		auto x = ds.find(l.a);
		auto y = ds.find(l.b);
		if (x == y) {
			continue;
		}
		bool ok = valid[x] && valid[y] && compatible(members[x], members[y]);
		if (!ok) {
			for (auto c : {x, y}) {
				if (valid[c]) {
					groups.push_back(std::move(members[c]));
				}
				members[c].clear();
			}
		}
		ds.unite(x, y);
		auto root = ds.find(x);
		auto other = root == x ? y : x;
		if (ok) {
			auto &m = members[root];
			m.insert(m.end(), members[other].begin(), members[other].end());
			members[other].clear();
			members[other].shrink_to_fit();
		}
		valid[root] = ok;
	}
	for (RecordIndex r = 0; r < n; ++r) {
		if (ds.find(r) == r && valid[r]) {
			groups.push_back(std::move(members[r]));
		}
	}
	for (auto &g : groups) {
		std::sort(g.begin(), g.end());
	}
	std::sort(groups.begin(), groups.end(), [](const auto &x, const auto &y) { return x.front() < y.front(); });
	std::vector<LifeSegment> out;
	out.reserve(groups.size());
	for (const auto &grp : groups) {
		std::vector<SegmentEntry> entries;
		for (auto r : grp) {
			entries.push_back(store.segment_entry(r));
		}
		out.push_back(LifeSegment::make(std::move(entries), pairs));
	}
	return out;
}

inline void write_segments(const std::vector<LifeSegment> &segments, const RecordStore &store, std::ostream &out) {
	io::write_row(out, {"segment_id", "position", "record_id", "certificate_id", "event_year"});
	for (std::size_t s = 0; s < segments.size(); ++s) {
		const auto &entries = segments[s].entries();
		for (std::size_t p = 0; p < entries.size(); ++p) {
			io::write_row(out, {"S" + std::to_string(s + 1), std::to_string(p + 1),
			                    store.record(entries[p].record).record_id,
			                    store.certificate(entries[p].certificate).certificate_id,
			                    std::to_string(entries[p].event_year)});
		}
	}
}

} // namespace poplink
