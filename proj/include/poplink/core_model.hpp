#pragma once

#include "poplink/errors.hpp"
#include "poplink/text.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace poplink {

enum class CertificateType : std::uint8_t { Birth, Death, Marriage, Census };

inline constexpr std::array<CertificateType, 4> kCertificateTypes = {CertificateType::Birth, CertificateType::Death,
                                                                     CertificateType::Marriage,
                                                                     CertificateType::Census};

inline std::string_view to_string(CertificateType t) {
	switch (t) {
	case CertificateType::Birth:
		return "Birth";
	case CertificateType::Death:
		return "Death";
	case CertificateType::Marriage:
		return "Marriage";
	case CertificateType::Census:
		return "Census";
	}
	return "?";
}

inline std::optional<CertificateType> parse_certificate_type(std::string_view s) {
	for (auto t : kCertificateTypes) {
		if (text::iequals(s, to_string(t))) {
			return t;
		}
	}
	return std::nullopt;
}

using RoleId = std::uint16_t;
using RecordIndex = std::uint32_t;
using CertificateIndex = std::uint32_t;

struct RoleType {
	std::string name;
	CertificateType certificate_type;
};

/// The configured role inventory. Role names are unique within one
/// certificate type; the same name may recur across types (a Mother on a
/// birth and a Mother on a death certificate are different roles).
class RoleVocabulary {
public:
	RoleId add(std::string name, CertificateType type) {
		if (find(type, name)) {
			throw ConfigError("duplicate role '" + name + "' for certificate type " + std::string(to_string(type)));
		}
		roles_.push_back({std::move(name), type});
		return static_cast<RoleId>(roles_.size() - 1);
	}

	[[nodiscard]] std::size_t size() const { return roles_.size(); }
	[[nodiscard]] const RoleType &operator[](RoleId id) const { return roles_.at(id); }
	[[nodiscard]] const std::vector<RoleType> &roles() const { return roles_; }

	[[nodiscard]] std::optional<RoleId> find(CertificateType type, std::string_view name) const {
		for (std::size_t i = 0; i < roles_.size(); ++i) {
			if (roles_[i].certificate_type == type && text::iequals(roles_[i].name, name)) {
				return static_cast<RoleId>(i);
			}
		}
		return std::nullopt;
	}

	/// Resolve "Type:Name" or a bare name that is unambiguous across types.
	[[nodiscard]] RoleId resolve(std::string_view qualified) const {
		if (auto colon = qualified.find(':'); colon != std::string_view::npos) {
			auto type = parse_certificate_type(qualified.substr(0, colon));
			if (!type) {
				throw ConfigError("unknown certificate type in role '" + std::string(qualified) + "'");
			}
			if (auto id = find(*type, qualified.substr(colon + 1))) {
				return *id;
			}
			throw ConfigError("unknown role '" + std::string(qualified) + "'");
		}
		std::optional<RoleId> hit;
		for (std::size_t i = 0; i < roles_.size(); ++i) {
			if (text::iequals(roles_[i].name, qualified)) {
				if (hit) {
					throw ConfigError("ambiguous role '" + std::string(qualified) + "', qualify it as Type:Name");
				}
				hit = static_cast<RoleId>(i);
			}
		}
		if (!hit) {
			throw ConfigError("unknown role '" + std::string(qualified) + "'");
		}
		return *hit;
	}

	[[nodiscard]] std::string qualified_name(RoleId id) const {
		const auto &r = roles_.at(id);
		return std::string(to_string(r.certificate_type)) + ":" + r.name;
	}

private:
	std::vector<RoleType> roles_;
};

/// Ordered role pairs one person may hold across two certificates.
class RolePairSet {
public:
	RolePairSet() = default;
	explicit RolePairSet(std::size_t role_count) : n_(role_count), bits_(role_count * role_count, false) {}

	void add(RoleId a, RoleId b) {
		check(a);
		check(b);
		bits_[index(a, b)] = true;
	}

	[[nodiscard]] bool contains_ordered(RoleId a, RoleId b) const {
		return a < n_ && b < n_ && bits_[index(a, b)];
	}

	[[nodiscard]] std::size_t role_count() const { return n_; }

	[[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), true)); }

private:
	void check(RoleId r) const {
		if (r >= n_) {
			throw ConfigError("role id out of range for role pair set");
		}
	}
	[[nodiscard]] std::size_t index(RoleId a, RoleId b) const { return static_cast<std::size_t>(a) * n_ + b; }

	std::size_t n_ = 0;
	std::vector<bool> bits_;
};

/// True iff (a,b) or (b,a) is listed. Unknown roles are simply not listed.
inline bool is_valid_role_pair(RoleId a, RoleId b, const RolePairSet &pairs) {
	return pairs.contains_ordered(a, b) || pairs.contains_ordered(b, a);
}

struct TemporalWindow {
	int min = 0;
	int max = 0;

	[[nodiscard]] bool contains(int delta) const { return min <= delta && delta <= max; }
	friend bool operator==(const TemporalWindow &, const TemporalWindow &) = default;
};

/// Allowed event-year differences per role pair and per certificate
/// linkage type. A window stored for the ordered pair (a, b) bounds
/// year(b) - year(a); pairs without an entry are unconstrained.
class TemporalConstraintTable {
public:
	TemporalConstraintTable() = default;
	explicit TemporalConstraintTable(std::size_t role_count)
	    : n_(role_count), role_windows_(role_count * role_count) {}

	void set(RoleId a, RoleId b, TemporalWindow w) {
		if (w.min > w.max) {
			throw ConfigError("temporal window with min > max");
		}
		if (a >= n_ || b >= n_) {
			throw ConfigError("role id out of range for temporal table");
		}
		role_windows_[static_cast<std::size_t>(a) * n_ + b] = w;
	}

	[[nodiscard]] std::optional<TemporalWindow> get(RoleId a, RoleId b) const {
		if (a >= n_ || b >= n_) {
			return std::nullopt;
		}
		return role_windows_[static_cast<std::size_t>(a) * n_ + b];
	}

	void set_certificate_window(const std::string &linkage_type, TemporalWindow w) {
		if (w.min > w.max) {
			throw ConfigError("temporal window with min > max for '" + linkage_type + "'");
		}
		certificate_windows_[linkage_type] = w;
	}

	[[nodiscard]] std::optional<TemporalWindow> certificate_window(const std::string &linkage_type) const {
		auto it = certificate_windows_.find(linkage_type);
		if (it == certificate_windows_.end()) {
			return std::nullopt;
		}
		return it->second;
	}

	[[nodiscard]] std::size_t role_count() const { return n_; }

private:
	std::size_t n_ = 0;
	std::vector<std::optional<TemporalWindow>> role_windows_;
	std::map<std::string, TemporalWindow, std::less<>> certificate_windows_;
};

/// Role-level temporal filter. Windows are oriented by role: an entry for
/// (a, b) bounds year(b) - year(a), so (Baby, Deceased) with [-2, 999]
/// accepts a death recorded up to two years before the birth. When both
/// orientations are configured both must hold; a role paired with itself
/// compares the absolute year difference. The result is therefore the same
/// whichever record is passed first.
inline bool temporal_check(RoleId role_a, int year_a, RoleId role_b, int year_b, const TemporalConstraintTable &t) {
	if (role_a == role_b) {
		if (auto w = t.get(role_a, role_b)) {
			return w->contains(std::abs(year_a - year_b));
		}
		return true;
	}
	if (auto w = t.get(role_a, role_b); w && !w->contains(year_b - year_a)) {
		return false;
	}
	if (auto w = t.get(role_b, role_a); w && !w->contains(year_a - year_b)) {
		return false;
	}
	return true;
}

enum class Cardinality : std::uint8_t { OneToOne, OneToMany, ManyToOne, ManyToMany };

inline std::string_view to_string(Cardinality c) {
	switch (c) {
	case Cardinality::OneToOne:
		return "1-to-1";
	case Cardinality::OneToMany:
		return "1-to-m";
	case Cardinality::ManyToOne:
		return "m-to-1";
	case Cardinality::ManyToMany:
		return "m-to-m";
	}
	return "?";
}

inline std::optional<Cardinality> parse_cardinality(std::string_view s) {
	for (auto c : {Cardinality::OneToOne, Cardinality::OneToMany, Cardinality::ManyToOne, Cardinality::ManyToMany}) {
		if (text::iequals(s, to_string(c))) {
			return c;
		}
	}
	return std::nullopt;
}

/// Cardinality rule per certificate linkage type; missing means ManyToMany.
class LinkConstraintTable {
public:
	void set(std::string linkage_type, Cardinality c) { entries_[std::move(linkage_type)] = c; }

	[[nodiscard]] Cardinality get(const std::string &linkage_type) const {
		auto it = entries_.find(linkage_type);
		return it == entries_.end() ? Cardinality::ManyToMany : it->second;
	}

	[[nodiscard]] const std::map<std::string, Cardinality, std::less<>> &entries() const { return entries_; }

private:
	std::map<std::string, Cardinality, std::less<>> entries_;
};

struct IndividualRecord {
	std::string record_id;
	std::string certificate_id;
	RoleId role = 0;
	std::vector<std::optional<std::string>> attributes; // indexed by AttributeSchema
	std::optional<std::string> entity_id;
};

struct Certificate {
	std::string certificate_id;
	CertificateType type = CertificateType::Birth;
	int event_year = 0;
	std::vector<RecordIndex> members;
};

/// One record of a life segment together with the values ordering and
/// validation need. Certificate indexes follow certificate_id order in the
/// record store, so comparing them is comparing ids.
struct SegmentEntry {
	RecordIndex record = 0;
	CertificateIndex certificate = 0;
	int event_year = 0;
	RoleId role = 0;

	friend bool operator==(const SegmentEntry &, const SegmentEntry &) = default;
};

/// Stable sort by event year, ties broken by certificate id.
inline std::vector<SegmentEntry> order_by_event_year(std::vector<SegmentEntry> entries) {
	std::stable_sort(entries.begin(), entries.end(), [](const SegmentEntry &a, const SegmentEntry &b) {
		if (a.event_year != b.event_year) {
			return a.event_year < b.event_year;
		}
		return a.certificate < b.certificate;
	});
	return entries;
}

/// Why a candidate record sequence is not a life segment.
enum class SegmentViolation : std::uint8_t { None, Empty, YearOrder, SameCertificate, InvalidRolePair };

inline SegmentViolation check_segment(const std::vector<SegmentEntry> &entries, const RolePairSet &pairs) {
	if (entries.empty()) {
		return SegmentViolation::Empty;
	}
	for (std::size_t i = 1; i < entries.size(); ++i) {
		if (entries[i - 1].event_year > entries[i].event_year) {
			return SegmentViolation::YearOrder;
		}
	}
	for (std::size_t i = 0; i < entries.size(); ++i) {
		for (std::size_t j = i + 1; j < entries.size(); ++j) {
			if (entries[i].certificate == entries[j].certificate) {
				return SegmentViolation::SameCertificate;
			}
			if (!is_valid_role_pair(entries[i].role, entries[j].role, pairs)) {
				return SegmentViolation::InvalidRolePair;
			}
		}
	}
	return SegmentViolation::None;
}

/// Event-year ordered records of one reconstructed person.
class LifeSegment {
public:
	/// Orders the entries and validates them; throws IntegrityError when the
	/// result would break a segment invariant.
	static LifeSegment make(std::vector<SegmentEntry> entries, const RolePairSet &pairs) {
		auto ordered = order_by_event_year(std::move(entries));
		if (auto v = check_segment(ordered, pairs); v != SegmentViolation::None) {
			throw IntegrityError("invalid life segment (violation " + std::to_string(static_cast<int>(v)) + ")");
		}
		return LifeSegment(std::move(ordered));
	}

	[[nodiscard]] const std::vector<SegmentEntry> &entries() const { return entries_; }
	[[nodiscard]] std::size_t size() const { return entries_.size(); }

private:
	explicit LifeSegment(std::vector<SegmentEntry> e) : entries_(std::move(e)) {}
	std::vector<SegmentEntry> entries_;
};

} // namespace poplink
