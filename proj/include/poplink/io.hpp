#pragma once

#include "poplink/errors.hpp"
#include "poplink/text.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace poplink::io {

using Row = std::vector<std::string>;

/// RFC 4180 style CSV: comma separated, double-quoted fields may contain
/// commas, doubled quotes and line breaks. A trailing CR is dropped.
class CsvReader {
public:
	explicit CsvReader(std::istream &in) : in_(in) {}

	bool next(Row &row) {
		row.clear();
		std::string field;
		bool in_quotes = false;
		bool any = false;
		int c;
		while ((c = in_.get()) != EOF) {
			any = true;
			char ch = static_cast<char>(c);
			if (in_quotes) {
				if (ch == '"') {
					if (in_.peek() == '"') {
						field.push_back('"');
						in_.get();
					} else {
						in_quotes = false;
					}
				} else {
					field.push_back(ch);
				}
				continue;
			}
			if (ch == '"') {
				in_quotes = true;
			} else if (ch == ',') {
				row.push_back(std::move(field));
				field.clear();
			} else if (ch == '\n') {
				row.push_back(std::move(field));
				++line_;
				return true;
			} else if (ch != '\r') {
				field.push_back(ch);
			}
		}
		if (!any) {
			return false;
		}
		row.push_back(std::move(field));
		++line_;
		return true;
	}

	[[nodiscard]] std::size_t line() const { return line_; }

private:
	std::istream &in_;
	std::size_t line_ = 0;
};

inline std::string csv_escape(std::string_view s) {
	if (s.find_first_of(",\"\n\r") == std::string_view::npos) {
		return std::string(s);
	}
	std::string out = "\"";
	for (char c : s) {
		if (c == '"') {
			out.push_back('"');
		}
		out.push_back(c);
	}
	out.push_back('"');
	return out;
}

/// Fixed six-decimal rendering used in every stage file.
inline std::string format_score(double v) {
	char buf[64];
	std::snprintf(buf, sizeof buf, "%.6f", v);
	return buf;
}

/// Round to the six decimals the stage files carry, so a value read back
/// from disk is bit-identical to the in-memory one.
inline double quantize(double v) {
	return std::round(v * 1e6) / 1e6;
}

inline std::ifstream open_in(const std::filesystem::path &p) {
	std::ifstream in(p, std::ios::binary);
	if (!in) {
		throw std::runtime_error("cannot open '" + p.string() + "' for reading");
	}
	return in;
}

inline std::ofstream open_out(const std::filesystem::path &p) {
	if (p.has_parent_path()) {
		std::filesystem::create_directories(p.parent_path());
	}
	std::ofstream out(p, std::ios::binary | std::ios::trunc);
	if (!out) {
		throw std::runtime_error("cannot open '" + p.string() + "' for writing");
	}
	return out;
}

inline std::string read_file(const std::filesystem::path &p) {
	auto in = open_in(p);
	std::ostringstream ss;
	ss << in.rdbuf();
	return ss.str();
}

/// Tab separated rows; empty lines are skipped.
inline std::vector<std::vector<std::string>> read_tsv(const std::filesystem::path &p) {
	auto in = open_in(p);
	std::vector<std::vector<std::string>> rows;
	std::string line;
	while (std::getline(in, line)) {
		if (!line.empty() && line.back() == '\r') {
			line.pop_back();
		}
		if (line.empty()) {
			continue;
		}
		std::vector<std::string> row;
		for (auto f : text::split(line, '\t')) {
			row.emplace_back(f);
		}
		rows.push_back(std::move(row));
	}
	return rows;
}

inline void write_row(std::ostream &out, const std::vector<std::string> &fields) {
	for (std::size_t i = 0; i < fields.size(); ++i) {
		if (i) {
			out << '\t';
		}
		out << fields[i];
	}
	out << '\n';
}

} // namespace poplink::io
