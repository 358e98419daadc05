#ifndef WINFIT_TRACE_IO_HPP
#define WINFIT_TRACE_IO_HPP

#include <array>
#include <charconv>
#include <cstddef>
#include <cstdio>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "winfit/trace.hpp"

namespace winfit {

enum class TraceFormat : std::uint8_t { csv, ndjson };

inline std::optional<TraceFormat> parse_trace_format(std::string_view text) {
  if (text == "csv") return TraceFormat::csv;
  if (text == "ndjson") return TraceFormat::ndjson;
  return std::nullopt;
}

/// Raised when an input line cannot be decoded. what() names the 1-based
/// line number and the offending field.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

inline constexpr std::string_view kCsvHeader = "time,actor,object,kind";

namespace detail {

inline std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

inline Seconds parse_time_field(std::string_view text, std::size_t line) {
  Seconds value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ParseError(line, "field 'time': not an integer: '" + std::string(text) + "'");
  }
  if (value < 0) throw ParseError(line, "field 'time': negative timestamp");
  return value;
}

inline EventKind parse_kind_field(std::string_view text, std::size_t line) {
  if (text.empty()) return EventKind::generic;
  if (auto kind = parse_event_kind(text)) return *kind;
  throw ParseError(line, "field 'kind': unknown kind '" + std::string(text) + "'");
}

inline void append_json_string(std::string& out, std::string_view text) {
  out += '"';
  for (char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
}

inline void check_csv_identifier(const std::string& value, const char* field) {
  if (value.find_first_of(",\n\r") != std::string::npos) {
    throw std::invalid_argument(std::string("csv: ") + field +
                                " contains a separator character: '" + value + "'");
  }
}

}  // namespace detail

/// Reads CSV rows in input order. The stream must be empty or start with the
/// "time,actor,object,kind" header; object may be empty and an empty kind
/// defaults to generic.
inline std::vector<Event> read_events_csv(std::istream& in) {
  std::vector<Event> events;
  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view row = detail::strip_cr(line);
    if (!saw_header) {
      if (row != kCsvHeader) {
        throw ParseError(line_no, "expected header '" + std::string(kCsvHeader) + "'");
      }
      saw_header = true;
      continue;
    }
    if (row.empty()) continue;

    std::array<std::string_view, 4> fields;
    std::size_t count = 0;
    std::size_t pos = 0;
    bool overflow = false;
    for (;;) {
      const std::size_t comma = row.find(',', pos);
      const std::string_view field =
          comma == std::string_view::npos ? row.substr(pos) : row.substr(pos, comma - pos);
      if (count == fields.size()) {
        overflow = true;
        break;
      }
      fields[count++] = field;
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    if (overflow || count != fields.size()) {
      throw ParseError(line_no, "expected 4 fields 'time,actor,object,kind'");
    }

    Event e;
    e.time = detail::parse_time_field(fields[0], line_no);
    if (fields[1].empty()) throw ParseError(line_no, "field 'actor': must be non-empty");
    e.actor = std::string(fields[1]);
    e.object = std::string(fields[2]);
    e.kind = detail::parse_kind_field(fields[3], line_no);
    events.push_back(std::move(e));
  }
  return events;
}

/// Reads one JSON object per line: required integer "time" and string
/// "actor", optional string "object" and "kind". Blank lines are skipped.
inline std::vector<Event> read_events_ndjson(std::istream& in) {
  std::vector<Event> events;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view row = detail::strip_cr(line);
    if (row.empty()) continue;

    const nlohmann::json j = nlohmann::json::parse(row, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw ParseError(line_no, "not a JSON object");
    }

    Event e;
    const auto time_it = j.find("time");
    if (time_it == j.end() || !time_it->is_number_integer()) {
      throw ParseError(line_no, "field 'time': required integer");
    }
    if (time_it->is_number_unsigned() &&
        time_it->get<std::uint64_t>() >
            static_cast<std::uint64_t>(std::numeric_limits<Seconds>::max())) {
      throw ParseError(line_no, "field 'time': out of range");
    }
    e.time = time_it->get<Seconds>();
    if (e.time < 0) throw ParseError(line_no, "field 'time': negative timestamp");

    const auto actor_it = j.find("actor");
    if (actor_it == j.end() || !actor_it->is_string()) {
      throw ParseError(line_no, "field 'actor': required string");
    }
    e.actor = actor_it->get<std::string>();
    if (e.actor.empty()) throw ParseError(line_no, "field 'actor': must be non-empty");

    if (const auto it = j.find("object"); it != j.end()) {
      if (!it->is_string()) throw ParseError(line_no, "field 'object': must be a string");
      e.object = it->get<std::string>();
    }
    if (const auto it = j.find("kind"); it != j.end()) {
      if (!it->is_string()) throw ParseError(line_no, "field 'kind': must be a string");
      e.kind = detail::parse_kind_field(it->get_ref<const std::string&>(), line_no);
    }
    events.push_back(std::move(e));
  }
  return events;
}

inline std::vector<Event> read_events(std::istream& in, TraceFormat format) {
  return format == TraceFormat::csv ? read_events_csv(in) : read_events_ndjson(in);
}

/// Decodes a stream and builds the time-sorted trace (stable for ties).
inline Trace ingest(std::istream& in, TraceFormat format) {
  return Trace::from_events(read_events(in, format));
}

/// Writes the trace as CSV. Identifiers must not contain commas or line
/// breaks; use NDJSON for arbitrary text.
inline void write_csv(const Trace& trace, std::ostream& out) {
  out << kCsvHeader << '\n';
  std::string row;
  for (const Event& e : trace.events()) {
    detail::check_csv_identifier(e.actor, "actor");
    detail::check_csv_identifier(e.object, "object");
    row.clear();
    row += std::to_string(e.time);
    row += ',';
    row += e.actor;
    row += ',';
    row += e.object;
    row += ',';
    row += to_string(e.kind);
    row += '\n';
    out.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
}

inline void write_ndjson(const Trace& trace, std::ostream& out) {
  std::string row;
  for (const Event& e : trace.events()) {
    row.clear();
    row += "{\"time\":";
    row += std::to_string(e.time);
    row += ",\"actor\":";
    detail::append_json_string(row, e.actor);
    if (!e.object.empty()) {
      row += ",\"object\":";
      detail::append_json_string(row, e.object);
    }
    row += ",\"kind\":\"";
    row += to_string(e.kind);
    row += "\"}\n";
    out.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
}

inline void write_trace(const Trace& trace, std::ostream& out, TraceFormat format) {
  if (format == TraceFormat::csv) {
    write_csv(trace, out);
  } else {
    write_ndjson(trace, out);
  }
}

}  // namespace winfit

#endif  // WINFIT_TRACE_IO_HPP
