#pragma once

#include "poplink/core_model.hpp"
#include "poplink/errors.hpp"
#include "poplink/parallel.hpp"
#include "poplink/phonetic.hpp"
#include "poplink/record_store.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

namespace poplink {

enum class Encoding : std::uint8_t { None, Soundex, DMPrimary, DMAlternate };

inline std::string_view to_string(Encoding e) {
	switch (e) {
	case Encoding::None:
		return "none";
	case Encoding::Soundex:
		return "soundex";
	case Encoding::DMPrimary:
		return "double_metaphone";
	case Encoding::DMAlternate:
		return "double_metaphone_alt";
	}
	return "?";
}

inline Encoding parse_encoding(std::string_view s) {
	for (auto e : {Encoding::None, Encoding::Soundex, Encoding::DMPrimary, Encoding::DMAlternate}) {
		if (s == to_string(e)) {
			return e;
		}
	}
	if (s == "double_metaphone_primary") {
		return Encoding::DMPrimary;
	}
	throw ConfigError("unknown encoding '" + std::string(s) + "'");
}

inline std::string encode_value(std::string_view v, Encoding e) {
	switch (e) {
	case Encoding::None:
		return std::string(v);
	case Encoding::Soundex:
		return soundex(v);
	case Encoding::DMPrimary:
		return double_metaphone(v).primary;
	case Encoding::DMAlternate:
		return double_metaphone(v).alternate;
	}
	return {};
}

/// One blocking key: the roles whose records it indexes and the (encoded)
/// attributes that form the block value. No attributes means one block per
/// key holding every record of the listed roles.
struct BlockingKey {
	std::string id;
	std::vector<RoleId> roles;
	std::vector<std::size_t> attributes;
	std::vector<Encoding> encodings; // parallel to attributes

	/// Block value of record r, or none when a keyed attribute is absent or
	/// encodes to nothing.
	[[nodiscard]] std::optional<std::string> value(const RecordStore &store, RecordIndex r) const {
		std::string out;
		for (std::size_t i = 0; i < attributes.size(); ++i) {
			const auto &v = store.value(r, attributes[i]);
			if (!v) {
				return std::nullopt;
			}
			auto code = encode_value(*v, encodings[i]);
			if (code.empty()) {
				return std::nullopt;
			}
			if (i) {
				out.push_back('|');
			}
			out += code;
		}
		return out;
	}
};

/// Reject keys whose role set mixes roles one person cannot hold together.
inline void validate_key(const BlockingKey &key, const RolePairSet &pairs, const RoleVocabulary &vocab) {
	if (key.roles.empty()) {
		throw ConfigError("blocking key '" + key.id + "' has an empty role set");
	}
	if (key.attributes.size() != key.encodings.size()) {
		throw ConfigError("blocking key '" + key.id + "' needs one encoding per attribute");
	}
	for (std::size_t i = 0; i < key.roles.size(); ++i) {
		for (std::size_t j = i + 1; j < key.roles.size(); ++j) {
			if (key.roles[i] != key.roles[j] && !is_valid_role_pair(key.roles[i], key.roles[j], pairs)) {
				throw ConfigError("blocking key '" + key.id + "' combines roles " + vocab.qualified_name(key.roles[i]) +
				                  " and " + vocab.qualified_name(key.roles[j]) + " which are not a valid role pair");
			}
		}
	}
}

/// A blocking template multiplies role sets, attribute combinations and
/// encodings into concrete keys. Encodings apply to text attributes only;
/// attributes listed in `numeric` are always used verbatim.
struct BlockingTemplate {
	std::vector<std::pair<std::string, std::vector<RoleId>>> role_sets;
	std::vector<std::vector<std::size_t>> attribute_sets;
	std::vector<Encoding> encodings;
};

inline std::vector<BlockingKey> expand_template(const BlockingTemplate &t, const AttributeSchema &schema,
                                                const std::vector<std::size_t> &numeric) {
	std::vector<BlockingKey> keys;
	for (const auto &[set_name, roles] : t.role_sets) {
		for (const auto &attrs : t.attribute_sets) {
			bool has_text = std::any_of(attrs.begin(), attrs.end(), [&](std::size_t a) {
				return std::find(numeric.begin(), numeric.end(), a) == numeric.end();
			});
			std::vector<Encoding> encs = has_text ? t.encodings : std::vector<Encoding>{Encoding::None};
			for (auto enc : encs) {
				BlockingKey k;
				k.roles = roles;
				k.attributes = attrs;
				k.id = set_name;
				for (auto a : attrs) {
					bool is_numeric = std::find(numeric.begin(), numeric.end(), a) != numeric.end();
					auto e = is_numeric ? Encoding::None : enc;
					k.encodings.push_back(e);
					k.id += "/" + schema[a];
					if (e != Encoding::None) {
						k.id += ":" + std::string(to_string(e));
					}
				}
				keys.push_back(std::move(k));
			}
		}
	}
	return keys;
}

struct Block {
	std::uint32_t key = 0;
	std::string value;
	std::vector<RecordIndex> records; // ascending
};

/// Blocks ordered by key index, then block value.
inline std::vector<Block> build_blocks(const RecordStore &store, const std::vector<BlockingKey> &keys,
                                       std::size_t workers = 1) {
	auto per_key = parallel_collect<Block>(keys.size(), workers, [&](std::size_t k, std::vector<Block> &out) {
		const auto &key = keys[k];
		std::map<std::string, std::vector<RecordIndex>> blocks;
		for (auto role : key.roles) {
			if (role >= store.vocabulary().size()) {
				continue;
			}
			for (auto r : store.records_with_role(role)) {
				if (auto v = key.value(store, r)) {
					blocks[*v].push_back(r);
				}
			}
		}
		for (auto &[value, recs] : blocks) {
			std::sort(recs.begin(), recs.end());
			recs.erase(std::unique(recs.begin(), recs.end()), recs.end());
			out.push_back({static_cast<std::uint32_t>(k), value, std::move(recs)});
		}
	});
	return per_key;
}

/// Filters every candidate pair must pass before it is compared.
struct CandidateFilter {
	const RolePairSet *role_pairs = nullptr;
	const TemporalConstraintTable *temporal = nullptr;
	bool census_decade_limit = false;

	[[nodiscard]] bool accept(const RecordStore &store, RecordIndex a, RecordIndex b) const {
		auto ca = store.certificate_of(a);
		auto cb = store.certificate_of(b);
		if (ca == cb) {
			return false;
		}
		const auto &ra = store.record(a);
		const auto &rb = store.record(b);
		if (role_pairs && !is_valid_role_pair(ra.role, rb.role, *role_pairs)) {
			return false;
		}
		const auto &cert_a = store.certificate(ca);
		const auto &cert_b = store.certificate(cb);
		if (temporal && !temporal_check(ra.role, cert_a.event_year, rb.role, cert_b.event_year, *temporal)) {
			return false;
		}
		if (census_decade_limit &&
		    (cert_a.type == CertificateType::Census || cert_b.type == CertificateType::Census) &&
		    std::abs(cert_a.event_year - cert_b.event_year) > 10) {
			return false;
		}
		return true;
	}
};

/// Deduplicated candidate pairs, sorted by (first, second) with first <
/// second in record index (= record id) order. keys_of(i) lists the keys
/// whose blocks produced pair i.
class CandidateSet {
public:
	CandidateSet() = default;

	/// Build from raw (a, b, key) triples; a < b required.
	static CandidateSet from_triples(std::vector<std::tuple<RecordIndex, RecordIndex, std::uint32_t>> triples) {
		std::sort(triples.begin(), triples.end());
		triples.erase(std::unique(triples.begin(), triples.end()), triples.end());
		CandidateSet s;
		s.offsets_.push_back(0);
		for (std::size_t i = 0; i < triples.size(); ++i) {
			auto [a, b, k] = triples[i];
			if (s.pairs_.empty() || s.pairs_.back() != std::make_pair(a, b)) {
				if (!s.pairs_.empty()) {
					s.offsets_.push_back(static_cast<std::uint32_t>(s.keys_.size()));
				}
				s.pairs_.emplace_back(a, b);
			}
			s.keys_.push_back(k);
		}
		if (!s.pairs_.empty()) {
			s.offsets_.push_back(static_cast<std::uint32_t>(s.keys_.size()));
		}
		return s;
	}

	[[nodiscard]] std::size_t size() const { return pairs_.size(); }
	[[nodiscard]] bool empty() const { return pairs_.empty(); }
	[[nodiscard]] const std::pair<RecordIndex, RecordIndex> &operator[](std::size_t i) const { return pairs_[i]; }
	[[nodiscard]] const std::vector<std::pair<RecordIndex, RecordIndex>> &pairs() const { return pairs_; }

	[[nodiscard]] std::vector<std::uint32_t> keys_of(std::size_t i) const {
		return {keys_.begin() + offsets_[i], keys_.begin() + offsets_[i + 1]};
	}

private:
	std::vector<std::pair<RecordIndex, RecordIndex>> pairs_;
	std::vector<std::uint32_t> offsets_;
	std::vector<std::uint32_t> keys_;
};

struct BlockingStats {
	std::size_t blocks = 0;
	std::size_t oversized_blocks = 0;
	std::size_t compared_within_blocks = 0;
	std::size_t candidates = 0;
};

/// Emit every within-block pair that passes the filter, deduplicated across
/// keys. Blocks above `max_block_size` are reported through `warn` and still
/// processed.
inline CandidateSet emit_candidates(const RecordStore &store, const std::vector<Block> &blocks,
                                    const CandidateFilter &filter, std::size_t workers = 1,
                                    std::size_t max_block_size = 10000,
                                    const std::function<void(const std::string &)> &warn = {},
                                    BlockingStats *stats = nullptr) {
	using Triple = std::tuple<RecordIndex, RecordIndex, std::uint32_t>;
	std::size_t oversized = 0;
	std::size_t within = 0;
	for (const auto &b : blocks) {
		within += b.records.size() * (b.records.size() - (b.records.empty() ? 0 : 1)) / 2;
		if (b.records.size() > max_block_size) {
			++oversized;
			if (warn) {
				warn("oversized block (key " + std::to_string(b.key) + ", value '" + b.value + "'): " +
				     std::to_string(b.records.size()) + " records");
			}
		}
	}
	auto triples = parallel_collect<Triple>(blocks.size(), workers, [&](std::size_t i, std::vector<Triple> &out) {
		const auto &recs = blocks[i].records;
		for (std::size_t x = 0; x < recs.size(); ++x) {
			for (std::size_t y = x + 1; y < recs.size(); ++y) {
				if (filter.accept(store, recs[x], recs[y])) {
					out.emplace_back(recs[x], recs[y], blocks[i].key);
				}
			}
		}
	});
	auto set = CandidateSet::from_triples(std::move(triples));
	if (stats) {
		stats->blocks = blocks.size();
		stats->oversized_blocks = oversized;
		stats->compared_within_blocks = within;
		stats->candidates = set.size();
	}
	return set;
}

} // namespace poplink
