#include <fstream>
#include <sstream>

#include "detail/text.hpp"
#include "mcfcnf/instance.hpp"

namespace mcfcnf {
namespace {

using detail::TextLine;

class LineReader {
 public:
  explicit LineReader(std::string_view text) : lines_(detail::tokenize_lines(text)) {}

  const TextLine& next(std::string_view expecting) {
    if (index_ >= lines_.size()) {
      throw ParseError(0, "unexpected end of input, expected " + std::string(expecting));
    }
    return lines_[index_++];
  }

  void expect_end() const {
    if (index_ < lines_.size()) {
      throw ParseError(lines_[index_].number, "unexpected trailing content");
    }
  }

 private:
  std::vector<TextLine> lines_;
  std::size_t index_ = 0;
};

void expect_keyword(const TextLine& line, std::size_t at, std::string_view keyword) {
  if (line.tokens.size() <= at || line.tokens[at] != keyword) {
    throw ParseError(line.number, "expected '" + std::string(keyword) + "'");
  }
}

void expect_token_count(const TextLine& line, std::size_t count) {
  if (line.tokens.size() != count) {
    throw ParseError(line.number, "expected " + std::to_string(count) + " fields, found " +
                                      std::to_string(line.tokens.size()));
  }
}

double number_at(const TextLine& line, std::size_t at) {
  auto value = detail::parse_double(line.tokens.at(at));
  if (!value) {
    throw ParseError(line.number, "invalid number '" + std::string(line.tokens[at]) + "'");
  }
  return *value;
}

std::int64_t integer_at(const TextLine& line, std::size_t at) {
  auto value = detail::parse_int(line.tokens.at(at));
  if (!value) {
    throw ParseError(line.number, "invalid integer '" + std::string(line.tokens[at]) + "'");
  }
  return *value;
}

void expect_header(LineReader& reader, std::string_view magic) {
  const TextLine& line = reader.next(magic);
  expect_token_count(line, 2);
  expect_keyword(line, 0, magic);
  if (line.tokens[1] != "1") throw ParseError(line.number, "unsupported format version");
}

double read_target(LineReader& reader) {
  const TextLine& line = reader.next("TARGET");
  expect_keyword(line, 0, "TARGET");
  expect_token_count(line, 2);
  return number_at(line, 1);
}

std::vector<double> read_capacities(LineReader& reader) {
  const TextLine& line = reader.next("CAPACITIES");
  expect_keyword(line, 0, "CAPACITIES");
  if (line.tokens.size() < 2) throw ParseError(line.number, "missing capacity count");
  const std::int64_t count = integer_at(line, 1);
  if (count < 1) throw ParseError(line.number, "need at least one capacity");
  expect_token_count(line, static_cast<std::size_t>(count) + 2);
  std::vector<double> capacities;
  for (std::int64_t k = 0; k < count; ++k) {
    capacities.push_back(number_at(line, static_cast<std::size_t>(k) + 2));
  }
  return capacities;
}

std::size_t read_count(LineReader& reader, std::string_view keyword) {
  const TextLine& line = reader.next(keyword);
  expect_keyword(line, 0, keyword);
  expect_token_count(line, 2);
  const std::int64_t count = integer_at(line, 1);
  if (count < 0) throw ParseError(line.number, "negative count");
  return static_cast<std::size_t>(count);
}

struct EdgeTable {
  std::vector<Edge> edges;
  std::vector<double> fixed_cost;
  std::vector<double> variable_cost;
  std::vector<std::uint8_t> available;
};

EdgeTable read_edges(LineReader& reader, std::size_t capacity_count) {
  const std::size_t count = read_count(reader, "EDGES");
  EdgeTable table;
  for (std::size_t e = 0; e < count; ++e) {
    const TextLine& line = reader.next("edge line");
    expect_token_count(line, 2 + 2 * capacity_count);
    Edge edge{static_cast<VertexId>(integer_at(line, 0)),
              static_cast<VertexId>(integer_at(line, 1))};
    table.edges.push_back(edge);
    for (std::size_t k = 0; k < capacity_count; ++k) {
      const std::size_t at = 2 + 2 * k;
      if (line.tokens[at] == "NA") {
        table.fixed_cost.push_back(0.0);
        table.variable_cost.push_back(0.0);
        table.available.push_back(0);
        if (line.tokens[at + 1] != "NA") (void)number_at(line, at + 1);
      } else {
        table.fixed_cost.push_back(number_at(line, at));
        table.variable_cost.push_back(number_at(line, at + 1));
        table.available.push_back(1);
      }
    }
  }
  return table;
}

void write_capacities(std::ostream& out, const std::vector<double>& capacities) {
  out << "CAPACITIES " << capacities.size();
  for (double c : capacities) out << ' ' << detail::format_number(c);
  out << '\n';
}

void write_edges(std::ostream& out, const std::vector<Edge>& edges,
                 const std::vector<double>& fixed, const std::vector<double>& variable,
                 const std::vector<std::uint8_t>& available, std::size_t capacity_count) {
  out << "EDGES " << edges.size() << '\n';
  for (std::size_t e = 0; e < edges.size(); ++e) {
    out << edges[e].src << ' ' << edges[e].dest;
    for (std::size_t k = 0; k < capacity_count; ++k) {
      const std::size_t p = e * capacity_count + k;
      if (available[p]) {
        out << ' ' << detail::format_number(fixed[p]) << ' '
            << detail::format_number(variable[p]);
      } else {
        out << " NA NA";
      }
    }
    out << '\n';
  }
}

std::vector<Terminal> read_terminals(LineReader& reader, std::string_view keyword) {
  const std::size_t count = read_count(reader, keyword);
  std::vector<Terminal> terminals;
  for (std::size_t i = 0; i < count; ++i) {
    const TextLine& line = reader.next("terminal line");
    expect_token_count(line, 4);
    terminals.push_back(Terminal{static_cast<VertexId>(integer_at(line, 0)),
                                 number_at(line, 1), number_at(line, 2), number_at(line, 3)});
  }
  return terminals;
}

void write_terminals(std::ostream& out, std::string_view keyword,
                     const std::vector<Terminal>& terminals) {
  out << keyword << ' ' << terminals.size() << '\n';
  for (const Terminal& t : terminals) {
    out << t.vertex << ' ' << detail::format_number(t.open_cost) << ' '
        << detail::format_number(t.unit_cost) << ' ' << detail::format_number(t.limit) << '\n';
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

Instance parse_instance(std::string_view text) {
  LineReader reader(text);
  expect_header(reader, "MCFCNF");

  Instance instance;
  const TextLine& vertices = reader.next("VERTICES");
  expect_token_count(vertices, 6);
  expect_keyword(vertices, 0, "VERTICES");
  expect_keyword(vertices, 2, "SOURCE");
  expect_keyword(vertices, 4, "SINK");
  instance.vertex_count = static_cast<int>(integer_at(vertices, 1));
  instance.source = static_cast<VertexId>(integer_at(vertices, 3));
  instance.sink = static_cast<VertexId>(integer_at(vertices, 5));

  instance.target = read_target(reader);
  instance.capacities = read_capacities(reader);
  EdgeTable table = read_edges(reader, instance.capacities.size());
  instance.edges = std::move(table.edges);
  instance.fixed_cost = std::move(table.fixed_cost);
  instance.variable_cost = std::move(table.variable_cost);
  instance.available = std::move(table.available);
  reader.expect_end();
  return instance;
}

Instance load_instance(const std::filesystem::path& path) {
  Instance instance = parse_instance(read_file(path));
  const auto violations = structural_violations(instance);
  if (!violations.empty()) {
    std::string message = path.string() + ": " + violations.front();
    for (std::size_t i = 1; i < violations.size(); ++i) message += "; " + violations[i];
    throw ValidationError(message);
  }
  return instance;
}

std::string format_instance(const Instance& instance) {
  std::ostringstream out;
  out << "MCFCNF 1\n";
  out << "VERTICES " << instance.vertex_count << " SOURCE " << instance.source << " SINK "
      << instance.sink << '\n';
  out << "TARGET " << detail::format_number(instance.target) << '\n';
  write_capacities(out, instance.capacities);
  write_edges(out, instance.edges, instance.fixed_cost, instance.variable_cost,
              instance.available, instance.capacity_count());
  return out.str();
}

void save_instance(const std::filesystem::path& path, const Instance& instance) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << format_instance(instance);
  if (!out) throw IoError("write failed: " + path.string());
}

FacilityInstance parse_facility_instance(std::string_view text) {
  LineReader reader(text);
  expect_header(reader, "MCFCNF-FACILITY");

  FacilityInstance facility;
  const TextLine& vertices = reader.next("VERTICES");
  expect_keyword(vertices, 0, "VERTICES");
  expect_token_count(vertices, 2);
  facility.vertex_count = static_cast<int>(integer_at(vertices, 1));
  facility.target = read_target(reader);
  facility.capacities = read_capacities(reader);
  facility.sources = read_terminals(reader, "SOURCES");
  facility.sinks = read_terminals(reader, "SINKS");
  EdgeTable table = read_edges(reader, facility.capacities.size());
  facility.edges = std::move(table.edges);
  facility.fixed_cost = std::move(table.fixed_cost);
  facility.variable_cost = std::move(table.variable_cost);
  facility.available = std::move(table.available);
  reader.expect_end();
  return facility;
}

FacilityInstance load_facility_instance(const std::filesystem::path& path) {
  return parse_facility_instance(read_file(path));
}

std::string format_facility_instance(const FacilityInstance& facility) {
  std::ostringstream out;
  out << "MCFCNF-FACILITY 1\n";
  out << "VERTICES " << facility.vertex_count << '\n';
  out << "TARGET " << detail::format_number(facility.target) << '\n';
  write_capacities(out, facility.capacities);
  write_terminals(out, "SOURCES", facility.sources);
  write_terminals(out, "SINKS", facility.sinks);
  write_edges(out, facility.edges, facility.fixed_cost, facility.variable_cost,
              facility.available, facility.capacities.size());
  return out.str();
}

}  // namespace mcfcnf
