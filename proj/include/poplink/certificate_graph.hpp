#pragma once

#include "poplink/core_model.hpp"
#include "poplink/errors.hpp"
#include "poplink/pairwise.hpp"
#include "poplink/parallel.hpp"
#include "poplink/record_store.hpp"

#include <algorithm>
#include <initializer_list>
#include <map>
#include <tuple>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace poplink {

/// One individual link on a certificate edge; `lo` belongs to the edge's
/// lower certificate.
struct EdgeLink {
	RecordIndex lo = 0;
	RecordIndex hi = 0;
	double score = 0.0;
};

struct CertificateEdge {
	CertificateIndex a = 0; // a < b
	CertificateIndex b = 0;
	std::vector<EdgeLink> links;
	double max = 0.0;
	double sum = 0.0;

	[[nodiscard]] std::size_t multiplicity() const { return links.size(); }
	[[nodiscard]] double mean() const { return links.empty() ? 0.0 : sum / static_cast<double>(links.size()); }
	[[nodiscard]] CertificateIndex other(CertificateIndex c) const { return c == a ? b : a; }
};

/// Bitmask over certificate types; the default admits every type.
struct NeighborFilter {
	std::uint8_t types = 0x0F;

	static NeighborFilter all() { return {}; }
	static NeighborFilter of(std::initializer_list<CertificateType> ts) {
		NeighborFilter f{0};
		for (auto t : ts) {
			f.types |= static_cast<std::uint8_t>(1u << static_cast<unsigned>(t));
		}
		return f;
	}
	[[nodiscard]] bool admits(CertificateType t) const { return (types >> static_cast<unsigned>(t)) & 1u; }
	friend bool operator==(const NeighborFilter &, const NeighborFilter &) = default;
};

/// Certificates as vertices, individual links grouped into edges. Both
/// directions are indexed; adjacency lists are sorted by neighbor.
class CertificateGraph {
public:
	struct Adjacent {
		CertificateIndex neighbor;
		std::uint32_t edge;
	};

	static CertificateGraph build(const LinkSet &links, const RecordStore &store) {
		CertificateGraph g;
		g.types_.reserve(store.certificate_count());
		for (const auto &c : store.certificates()) {
			g.types_.push_back(c.type);
		}
		struct Item {
			CertificateIndex a, b;
			EdgeLink link;
		};
		std::vector<Item> items;
		items.reserve(links.links.size());
		for (const auto &l : links.links) {
			if (l.a >= store.record_count() || l.b >= store.record_count()) {
				throw IntegrityError("link set refers to a record outside the store");
			}
			auto ca = store.certificate_of(l.a);
			auto cb = store.certificate_of(l.b);
			if (ca == cb) {
				throw IntegrityError("link within certificate '" + store.certificate(ca).certificate_id + "'");
			}
			if (ca < cb) {
				items.push_back({ca, cb, {l.a, l.b, l.score}});
			} else {
				items.push_back({cb, ca, {l.b, l.a, l.score}});
			}
		}
		std::stable_sort(items.begin(), items.end(),
		                 [](const Item &x, const Item &y) { return std::tie(x.a, x.b) < std::tie(y.a, y.b); });
		for (const auto &it : items) {
			if (g.edges_.empty() || g.edges_.back().a != it.a || g.edges_.back().b != it.b) {
				g.edges_.push_back({it.a, it.b, {}, 0.0, 0.0});
			}
			auto &e = g.edges_.back();
			e.links.push_back(it.link);
			e.max = std::max(e.max, it.link.score);
			e.sum += it.link.score;
		}
		g.adjacency_.assign(store.certificate_count(), {});
		for (std::uint32_t i = 0; i < g.edges_.size(); ++i) {
			g.adjacency_[g.edges_[i].a].push_back({g.edges_[i].b, i});
			g.adjacency_[g.edges_[i].b].push_back({g.edges_[i].a, i});
		}
		for (auto &adj : g.adjacency_) {
			std::sort(adj.begin(), adj.end(),
			          [](const Adjacent &x, const Adjacent &y) { return x.neighbor < y.neighbor; });
		}
		return g;
	}

	[[nodiscard]] std::size_t vertex_count() const { return adjacency_.size(); }
	[[nodiscard]] std::size_t edge_count() const { return edges_.size(); }
	[[nodiscard]] const std::vector<CertificateEdge> &edges() const { return edges_; }
	[[nodiscard]] const CertificateEdge &edge(std::uint32_t i) const { return edges_.at(i); }
	[[nodiscard]] CertificateType type(CertificateIndex c) const { return types_.at(c); }

	[[nodiscard]] const std::vector<Adjacent> &adjacent(CertificateIndex c) const {
		if (c >= adjacency_.size()) {
			throw std::out_of_range("unknown certificate index " + std::to_string(c));
		}
		return adjacency_[c];
	}

	[[nodiscard]] std::size_t degree(CertificateIndex c) const { return adjacent(c).size(); }

	[[nodiscard]] std::optional<std::uint32_t> find_edge(CertificateIndex x, CertificateIndex y) const {
		const auto &adj = adjacent(x);
		auto it = std::lower_bound(adj.begin(), adj.end(), y,
		                           [](const Adjacent &a, CertificateIndex v) { return a.neighbor < v; });
		if (it == adj.end() || it->neighbor != y) {
			return std::nullopt;
		}
		return it->edge;
	}

	[[nodiscard]] std::size_t multiplicity(CertificateIndex x, CertificateIndex y) const {
		auto e = find_edge(x, y);
		return e ? edges_[*e].multiplicity() : 0;
	}

	[[nodiscard]] std::vector<CertificateIndex> neighbors(CertificateIndex c,
	                                                      NeighborFilter filter = NeighborFilter::all()) const {
		std::vector<CertificateIndex> out;
		for (const auto &a : adjacent(c)) {
			if (filter.admits(types_[a.neighbor])) {
				out.push_back(a.neighbor);
			}
		}
		return out;
	}

	[[nodiscard]] std::size_t total_multiplicity() const {
		std::size_t n = 0;
		for (const auto &e : edges_) {
			n += e.multiplicity();
		}
		return n;
	}

private:
	std::vector<CertificateType> types_;
	std::vector<CertificateEdge> edges_;
	std::vector<std::vector<Adjacent>> adjacency_;
};

/// One way two certificate types can be linked: an anchor role on each
/// side (the person both certificates describe) and the neighbor types
/// whose links count as relational evidence.
struct LinkageType {
	std::string name;
	CertificateType left_type = CertificateType::Birth;
	CertificateType right_type = CertificateType::Birth;
	RoleId left_role = 0;
	RoleId right_role = 0;
	NeighborFilter neighbors;
};

/// Which certificate of an edge plays the left side of `lt`: the one of the
/// left type, or for same-type links the earlier one (ties by id).
inline std::optional<std::pair<CertificateIndex, CertificateIndex>>
orient(const RecordStore &store, const LinkageType &lt, CertificateIndex x, CertificateIndex y) {
	const auto &cx = store.certificate(x);
	const auto &cy = store.certificate(y);
	if (lt.left_type == lt.right_type) {
		if (cx.type != lt.left_type || cy.type != lt.left_type) {
			return std::nullopt;
		}
		if (std::tie(cx.event_year, x) <= std::tie(cy.event_year, y)) {
			return std::make_pair(x, y);
		}
		return std::make_pair(y, x);
	}
	if (cx.type == lt.left_type && cy.type == lt.right_type) {
		return std::make_pair(x, y);
	}
	if (cy.type == lt.left_type && cx.type == lt.right_type) {
		return std::make_pair(y, x);
	}
	return std::nullopt;
}

/// True when the edge carries a link between the anchor roles of `lt` (in
/// its orientation) and the certificate-level window, if any, holds.
inline bool edge_matches(const RecordStore &store, const CertificateEdge &e, const LinkageType &lt,
                         const TemporalConstraintTable *temporal = nullptr) {
	auto o = orient(store, lt, e.a, e.b);
	if (!o) {
		return false;
	}
	if (temporal) {
		if (auto w = temporal->certificate_window(lt.name)) {
			int d = store.certificate(o->second).event_year - store.certificate(o->first).event_year;
			if (!w->contains(d)) {
				return false;
			}
		}
	}
	const bool left_is_lo = o->first == e.a;
	for (const auto &l : e.links) {
		RoleId rl = store.record(left_is_lo ? l.lo : l.hi).role;
		RoleId rr = store.record(left_is_lo ? l.hi : l.lo).role;
		if (rl == lt.left_role && rr == lt.right_role) {
			return true;
		}
	}
	return false;
}

struct EdgeMatch {
	std::uint32_t edge = 0;
	std::uint16_t linkage_type = 0;
};

/// Every (edge, linkage type) combination the graph supports, in edge then
/// type order.
inline std::vector<EdgeMatch> match_linkage_types(const CertificateGraph &g, const RecordStore &store,
                                                  const std::vector<LinkageType> &types,
                                                  const TemporalConstraintTable *temporal = nullptr,
                                                  std::size_t workers = 1) {
	// anchor role pair -> types using it, so each link only visits candidates
	std::map<std::pair<RoleId, RoleId>, std::vector<std::uint16_t>> by_anchor;
	for (std::size_t t = 0; t < types.size(); ++t) {
		by_anchor[{types[t].left_role, types[t].right_role}].push_back(static_cast<std::uint16_t>(t));
	}
	return parallel_collect<EdgeMatch>(g.edge_count(), workers, [&](std::size_t i, std::vector<EdgeMatch> &out) {
		const auto &e = g.edge(static_cast<std::uint32_t>(i));
		std::vector<std::uint16_t> hits;
		for (const auto &l : e.links) {
			RoleId lo = store.record(l.lo).role;
			RoleId hi = store.record(l.hi).role;
			for (auto key : {std::make_pair(lo, hi), std::make_pair(hi, lo)}) {
				if (auto it = by_anchor.find(key); it != by_anchor.end()) {
					hits.insert(hits.end(), it->second.begin(), it->second.end());
				}
			}
		}
		std::sort(hits.begin(), hits.end());
		hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
		for (auto t : hits) {
			if (edge_matches(store, e, types[t], temporal)) {
				out.push_back({static_cast<std::uint32_t>(i), t});
			}
		}
	});
}

} // namespace poplink
