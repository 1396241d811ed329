#pragma once

#include "poplink/core_model.hpp"
#include "poplink/errors.hpp"
#include "poplink/io.hpp"
#include "poplink/match_set.hpp"
#include "poplink/record_store.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace poplink {

using CertPair = std::pair<CertificateIndex, CertificateIndex>;

/// "birth-census" style label of a certificate type pair (alphabetical).
inline std::string category_name(CertificateType a, CertificateType b) {
	auto x = text::to_lower(to_string(a));
	auto y = text::to_lower(to_string(b));
	if (y < x) {
		std::swap(x, y);
	}
	return x + "-" + y;
}

inline std::string category_of(const RecordStore &store, CertificateIndex c1, CertificateIndex c2) {
	return category_name(store.certificate(c1).type, store.certificate(c2).type);
}

/// Gold certificate links with their category labels.
struct GoldLinkSet {
	std::map<CertPair, std::string> pairs;
	std::size_t unknown_ids = 0; // lines naming certificates absent from the store

	[[nodiscard]] std::size_t size() const { return pairs.size(); }
	[[nodiscard]] bool contains(CertPair p) const { return pairs.count(p) != 0; }

	void add(CertificateIndex a, CertificateIndex b, std::string label) {
		if (a > b) {
			std::swap(a, b);
		}
		pairs.emplace(CertPair{a, b}, std::move(label));
	}

	[[nodiscard]] std::vector<CertPair> list() const {
		std::vector<CertPair> out;
		for (const auto &[p, l] : pairs) {
			out.push_back(p);
		}
		return out;
	}
};

inline GoldLinkSet read_gold(const std::filesystem::path &path, const RecordStore &store) {
	GoldLinkSet gold;
	auto rows = io::read_tsv(path);
	std::size_t first = 0;
	if (!rows.empty() && rows[0].size() >= 2 && rows[0][0] == "cert_id_1") {
		first = 1;
	}
	for (std::size_t i = first; i < rows.size(); ++i) {
		const auto &row = rows[i];
		if (row.size() < 2) {
			throw SchemaError(path.string() + ": gold line " + std::to_string(i + 1) + " needs two certificate ids");
		}
		auto a = store.find_certificate(row[0]);
		auto b = store.find_certificate(row[1]);
		if (!a || !b || *a == *b) {
			++gold.unknown_ids;
			continue;
		}
		gold.add(*a, *b, row.size() >= 3 && !row[2].empty() ? row[2] : category_of(store, *a, *b));
	}
	return gold;
}

inline void write_gold(const GoldLinkSet &gold, const RecordStore &store, std::ostream &out) {
	io::write_row(out, {"cert_id_1", "cert_id_2", "link_type"});
	for (const auto &[p, label] : gold.pairs) {
		io::write_row(out, {store.certificate(p.first).certificate_id, store.certificate(p.second).certificate_id, label});
	}
}

struct Confusion {
	std::size_t tp = 0;
	std::size_t fp = 0;
	std::size_t fn = 0;

	/// Empty predictions have precision 0.
	[[nodiscard]] double precision() const { return tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0; }
	[[nodiscard]] double recall() const { return tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0; }
};

inline Confusion confusion(const std::set<CertPair> &predicted, const std::set<CertPair> &gold) {
	Confusion c;
	for (const auto &p : predicted) {
		if (gold.count(p)) {
			++c.tp;
		} else {
			++c.fp;
		}
	}
	c.fn = gold.size() - c.tp;
	return c;
}

struct PRPoint {
	double threshold = 0.0;
	double precision = 0.0;
	double recall = 0.0;
};

/// Precision and recall at every distinct score, highest first; tied scores
/// enter together. Recall is relative to `total_positives` when given (gold
/// links that were never predicted still count), else to the positives in
/// the list.
inline std::vector<PRPoint> pr_curve(std::vector<std::pair<double, bool>> scored,
                                     std::optional<std::size_t> total_positives = std::nullopt) {
	std::size_t listed = 0;
	for (const auto &s : scored) {
		listed += s.second ? 1 : 0;
	}
	const std::size_t positives = total_positives.value_or(listed);
	if (positives == 0) {
		throw std::invalid_argument("precision-recall needs at least one positive");
	}
	if (positives < listed) {
		throw std::invalid_argument("total positive count below the positives listed");
	}
	std::sort(scored.begin(), scored.end(), [](const auto &a, const auto &b) { return a.first > b.first; });
	std::vector<PRPoint> curve;
	std::size_t tp = 0;
	std::size_t seen = 0;
	for (std::size_t i = 0; i < scored.size();) {
		const double t = scored[i].first;
		while (i < scored.size() && scored[i].first == t) {
			tp += scored[i].second ? 1 : 0;
			++seen;
			++i;
		}
		curve.push_back({t, static_cast<double>(tp) / static_cast<double>(seen),
		                 static_cast<double>(tp) / static_cast<double>(positives)});
	}
	return curve;
}

/// Step-wise area: sum of recall increments times the precision reached.
inline double auc_pr(const std::vector<std::pair<double, bool>> &scored,
                     std::optional<std::size_t> total_positives = std::nullopt) {
	double area = 0.0;
	double last_recall = 0.0;
	for (const auto &p : pr_curve(scored, total_positives)) {
		area += (p.recall - last_recall) * p.precision;
		last_recall = p.recall;
	}
	return area;
}

struct PRReport {
	std::string label;
	Confusion counts;
	double auc = 0.0;
	std::vector<PRPoint> curve;
	std::size_t gold = 0;
};

/// Compare a match set (collapsed to certificate pairs) against gold links.
/// With `category` set only pairs and gold links of that category count.
inline PRReport evaluate(const CertificateMatchSet &m, const GoldLinkSet &gold, const RecordStore &store,
                         const std::optional<std::string> &category = std::nullopt) {
	PRReport r;
	r.label = category.value_or("all");
	// category as an unordered type pair, compared without building strings
	std::optional<std::pair<CertificateType, CertificateType>> want;
	if (category) {
		for (auto a : kCertificateTypes) {
			for (auto b : kCertificateTypes) {
				if (a <= b && category_name(a, b) == *category) {
					want = std::make_pair(a, b);
				}
			}
		}
		if (!want) {
			throw std::invalid_argument("unknown category '" + *category + "'");
		}
	}
	auto in_category = [&](const CertPair &p) {
		if (!want) {
			return true;
		}
		auto a = store.certificate(p.first).type;
		auto b = store.certificate(p.second).type;
		return std::make_pair(std::min(a, b), std::max(a, b)) == *want;
	};
	std::set<CertPair> gold_pairs;
	for (const auto &[p, label] : gold.pairs) {
		if (in_category(p)) {
			gold_pairs.insert(gold_pairs.end(), p);
		}
	}
	std::set<CertPair> predicted;
	std::vector<std::pair<double, bool>> scored;
	for (const auto &[p, s] : m.by_pair()) {
		if (!in_category(p)) {
			continue;
		}
		predicted.insert(predicted.end(), p);
		scored.emplace_back(s, gold_pairs.count(p) != 0);
	}
	r.counts = confusion(predicted, gold_pairs);
	r.gold = gold_pairs.size();
	if (!gold_pairs.empty()) {
		r.curve = pr_curve(scored, gold_pairs.size());
		double last = 0.0;
		for (const auto &p : r.curve) {
			r.auc += (p.recall - last) * p.precision;
			last = p.recall;
		}
	}
	return r;
}

inline std::string report_text(const std::vector<PRReport> &reports, const std::string &prefix) {
	std::ostringstream ss;
	for (const auto &r : reports) {
		std::string k = prefix + "." + r.label + ".";
		ss << k << "gold=" << r.gold << '\n';
		ss << k << "tp=" << r.counts.tp << '\n';
		ss << k << "fp=" << r.counts.fp << '\n';
		ss << k << "fn=" << r.counts.fn << '\n';
		ss << k << "precision=" << io::format_score(r.counts.precision()) << '\n';
		ss << k << "recall=" << io::format_score(r.counts.recall()) << '\n';
		ss << k << "auc_pr=" << io::format_score(r.auc) << '\n';
	}
	return ss.str();
}

inline void write_pr_curve(const PRReport &r, std::ostream &out) {
	io::write_row(out, {"threshold", "precision", "recall"});
	for (const auto &p : r.curve) {
		io::write_row(out, {io::format_score(p.threshold), io::format_score(p.precision), io::format_score(p.recall)});
	}
}

/// Gold links from entity ids: every pair of certificates (of the listed
/// categories) that share at least one entity.
inline GoldLinkSet gold_from_entities(const RecordStore &store, const std::set<std::string> &categories) {
	std::map<std::string, std::vector<CertificateIndex>> by_entity;
	for (RecordIndex r = 0; r < store.record_count(); ++r) {
		if (const auto &e = store.record(r).entity_id) {
			by_entity[*e].push_back(store.certificate_of(r));
		}
	}
	GoldLinkSet gold;
	for (auto &[e, certs] : by_entity) {
		std::sort(certs.begin(), certs.end());
		certs.erase(std::unique(certs.begin(), certs.end()), certs.end());
		for (std::size_t i = 0; i < certs.size(); ++i) {
			for (std::size_t j = i + 1; j < certs.size(); ++j) {
				auto cat = category_of(store, certs[i], certs[j]);
				if (categories.empty() || categories.count(cat)) {
					gold.add(certs[i], certs[j], cat);
				}
			}
		}
	}
	return gold;
}

} // namespace poplink
