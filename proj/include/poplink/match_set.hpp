#pragma once

#include "poplink/certificate_graph.hpp"
#include "poplink/errors.hpp"
#include "poplink/io.hpp"
#include "poplink/record_store.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <tuple>
#include <vector>

namespace poplink {

struct MatchEntry {
	CertificateIndex c1 = 0; // c1 < c2
	CertificateIndex c2 = 0;
	std::uint16_t linkage_type = 0;
	double score = 0.0;
	double relational = 0.0; // fused sets only
	double group = 0.0;

	[[nodiscard]] auto key() const { return std::make_tuple(c1, c2, linkage_type); }
};

/// Scored certificate pairs per linkage type, sorted by (c1, c2, type).
struct CertificateMatchSet {
	std::string method;
	std::vector<MatchEntry> entries;

	void sort() {
		std::sort(entries.begin(), entries.end(),
		          [](const MatchEntry &a, const MatchEntry &b) { return a.key() < b.key(); });
	}

	[[nodiscard]] std::size_t size() const { return entries.size(); }
	[[nodiscard]] bool empty() const { return entries.empty(); }

	/// Highest score per certificate pair, ignoring the linkage type.
	[[nodiscard]] std::map<std::pair<CertificateIndex, CertificateIndex>, double> by_pair() const {
		std::map<std::pair<CertificateIndex, CertificateIndex>, double> out;
		for (const auto &e : entries) {
			auto [it, inserted] = out.try_emplace({e.c1, e.c2}, e.score);
			if (!inserted) {
				it->second = std::max(it->second, e.score);
			}
		}
		return out;
	}
};

inline void write_match_set(const CertificateMatchSet &m, const RecordStore &store,
                            const std::vector<LinkageType> &types, std::ostream &out, bool fused = false) {
	std::vector<std::string> header = {"cert_id_1", "cert_id_2", "linkage_type", "method", "score"};
	if (fused) {
		header.insert(header.end(), {"relational_score", "group_score"});
	}
	io::write_row(out, header);
	for (const auto &e : m.entries) {
		std::vector<std::string> row = {store.certificate(e.c1).certificate_id, store.certificate(e.c2).certificate_id,
		                                types.at(e.linkage_type).name, m.method, io::format_score(e.score)};
		if (fused) {
			row.push_back(io::format_score(e.relational));
			row.push_back(io::format_score(e.group));
		}
		io::write_row(out, row);
	}
}

inline CertificateMatchSet read_match_set(const std::filesystem::path &path, const RecordStore &store,
                                          const std::vector<LinkageType> &types) {
	auto rows = io::read_tsv(path);
	CertificateMatchSet m;
	std::map<std::string, std::uint16_t, std::less<>> type_index;
	for (std::size_t t = 0; t < types.size(); ++t) {
		type_index[types[t].name] = static_cast<std::uint16_t>(t);
	}
	for (std::size_t i = 1; i < rows.size(); ++i) {
		const auto &row = rows[i];
		if (row.size() < 5) {
			throw IntegrityError(path.string() + ": short row " + std::to_string(i + 1));
		}
		auto c1 = store.find_certificate(row[0]);
		auto c2 = store.find_certificate(row[1]);
		auto lt = type_index.find(row[2]);
		auto s = text::parse_double(row[4]);
		if (!c1 || !c2 || lt == type_index.end() || !s) {
			throw IntegrityError(path.string() + ": unknown id, linkage type or score on line " +
			                     std::to_string(i + 1));
		}
		MatchEntry e;
		e.c1 = std::min(*c1, *c2);
		e.c2 = std::max(*c1, *c2);
		e.linkage_type = lt->second;
		e.score = *s;
		if (row.size() >= 7) {
			e.relational = text::parse_double(row[5]).value_or(0.0);
			e.group = text::parse_double(row[6]).value_or(0.0);
		}
		m.method = row[3];
		m.entries.push_back(e);
	}
	m.sort();
	return m;
}

} // namespace poplink
