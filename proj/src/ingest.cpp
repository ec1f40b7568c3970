#include "provlink/ingest.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "provlink/error.hpp"
#include "provlink/json_codec.hpp"

namespace provlink {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    if (nl == text.npos) nl = text.size();
    auto line = text.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
    start = nl + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string collapse(std::string_view mention) {
  std::string out;
  bool space = false;
  for (unsigned char c : trim(mention)) {
    if (std::isspace(c)) {
      space = true;
      continue;
    }
    if (space && !out.empty()) out += ' ';
    space = false;
    out += char(std::tolower(c));
  }
  return out;
}

void record(IngestReport& report, std::size_t line, const std::exception& ex) {
  auto code = ErrorCode::SchemaError;
  if (const auto* e = dynamic_cast<const Error*>(&ex)) code = e->code();
  report.errors.push_back({line, code, ex.what()});
}

}  // namespace

IngestReport ingest_jsonl(Engine& engine, const std::filesystem::path& path) {
  auto text = read_file(path);
  IngestReport report;
  auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    try {
      auto j = nlohmann::json::parse(lines[i]);
      engine.put_profile(profile_from_json(j));
      ++report.accepted;
    } catch (const nlohmann::json::exception& ex) {
      report.errors.push_back({i + 1, ErrorCode::SchemaError, ex.what()});
    } catch (const std::exception& ex) {
      record(report, i + 1, ex);
    }
  }
  return report;
}

void CsvMapping::validate(const std::vector<std::string>& header) const {
  std::set<std::string> columns(header.begin(), header.end());
  auto need = [&](const std::string& c) {
    if (!columns.contains(c)) throw Error(ErrorCode::MappingError, "unknown column: " + c);
  };
  need(id_column);
  std::set<std::string> used{id_column};
  auto claim = [&](const std::string& c) {
    need(c);
    if (!used.insert(c).second) throw Error(ErrorCode::MappingError, "column mapped twice: " + c);
  };
  for (const auto& [c, key] : attributes) {
    claim(c);
    if (key.empty()) throw Error(ErrorCode::MappingError, "empty attribute key for " + c);
  }
  for (const auto& [c, key] : relations) {
    claim(c);
    if (key.empty()) throw Error(ErrorCode::MappingError, "empty relation key for " + c);
  }
  for (const auto& [c, pc] : provenance) {
    claim(c);
    if (!attributes.contains(pc.column) && !relations.contains(pc.column)) {
      throw Error(ErrorCode::MappingError, "provenance column " + c + " owns unmapped column " + pc.column);
    }
    if (pc.pkey.empty()) throw Error(ErrorCode::MappingError, "empty pkey for " + c);
  }
}

CsvMapping CsvMapping::from_json(const nlohmann::json& j) {
  try {
    CsvMapping m;
    m.id_column = j.at("id_column").get<std::string>();
    m.type_value = j.value("type", std::string());
    if (j.contains("attributes")) m.attributes = j.at("attributes").get<std::map<std::string, std::string>>();
    if (j.contains("relations")) m.relations = j.at("relations").get<std::map<std::string, std::string>>();
    if (j.contains("provenance")) {
      for (const auto& [c, v] : j.at("provenance").items()) {
        m.provenance[c] = ProvColumn{v.at("column").get<std::string>(), v.at("pkey").get<std::string>()};
      }
    }
    return m;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::SchemaError, std::string("bad CSV mapping: ") + ex.what());
  }
}

CsvMapping CsvMapping::load(const std::filesystem::path& path) {
  auto text = read_file(path);
  try {
    return from_json(nlohmann::json::parse(text));
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::SchemaError, std::string("bad CSV mapping: ") + ex.what());
  }
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        quoted = true;
        any = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        any = true;
        break;
      case '\r':
        break;
      case '\n':
        if (any || !field.empty()) {
          row.push_back(std::move(field));
          rows.push_back(std::move(row));
        }
        row.clear();
        field.clear();
        any = false;
        break;
      default:
        field += c;
        any = true;
    }
  }
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

IngestReport ingest_csv(Engine& engine, const std::filesystem::path& path,
                        const CsvMapping& mapping) {
  auto rows = parse_csv(read_file(path));
  IngestReport report;
  if (rows.empty()) return report;
  const auto& header = rows.front();
  mapping.validate(header);
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col.emplace(header[i], i);

  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    auto cell = [&](const std::string& c) -> std::string {
      auto i = col.at(c);
      return i < row.size() ? std::string(trim(row[i])) : std::string();
    };
    try {
      std::map<std::string, Provenance> prov;
      for (const auto& [c, pc] : mapping.provenance) {
        auto v = cell(c);
        if (!v.empty()) prov[pc.column].push_back({pc.pkey, v});
      }
      std::vector<AttributeObject> attrs;
      if (!mapping.type_value.empty()) attrs.push_back({"type", mapping.type_value, {}});
      std::vector<RelationObject> rels;
      // Header order keeps the object order stable.
      for (const auto& c : header) {
        auto v = cell(c);
        if (v.empty()) continue;
        if (auto a = mapping.attributes.find(c); a != mapping.attributes.end()) {
          attrs.push_back({a->second, v, prov[c]});
        } else if (auto rel = mapping.relations.find(c); rel != mapping.relations.end()) {
          rels.push_back({rel->second, ProfileId(v), prov[c]});
        }
      }
      engine.put_profile(make_profile(ProfileId(cell(mapping.id_column)), std::move(attrs),
                                      std::move(rels)));
      ++report.accepted;
    } catch (const std::exception& ex) {
      record(report, r + 1, ex);
    }
  }
  return report;
}

ProfileId mention_id(std::string_view mention) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : collapse(mention)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[24];
  std::snprintf(buf, sizeof buf, "M_%016llx", static_cast<unsigned long long>(h));
  return ProfileId(buf);
}

IngestReport ingest_triples(Engine& engine, const std::filesystem::path& path) {
  auto text = read_file(path);
  IngestReport report;
  std::map<ProfileId, Profile> touched;
  auto profile_for = [&](std::string_view mention) -> Profile& {
    auto id = mention_id(mention);
    auto it = touched.find(id);
    if (it != touched.end()) return it->second;
    Profile p;
    if (auto existing = engine.find_profile(id)) {
      p = std::move(*existing);
    } else {
      p.id = id;
      p.attributes.push_back({"name", std::string(trim(mention)), {}});
    }
    return touched.emplace(id, std::move(p)).first->second;
  };

  auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    try {
      std::vector<std::string_view> fields;
      std::size_t start = 0;
      while (true) {
        auto tab = lines[i].find('\t', start);
        fields.push_back(trim(lines[i].substr(start, tab == lines[i].npos ? lines[i].npos : tab - start)));
        if (tab == lines[i].npos) break;
        start = tab + 1;
      }
      if (fields.size() < 3 || fields.size() > 4) {
        throw Error(ErrorCode::SchemaError, "expected subject, relation, object[, provenance]");
      }
      if (collapse(fields[0]).empty() || collapse(fields[2]).empty()) {
        throw Error(ErrorCode::SchemaError, "empty subject or object");
      }
      if (fields[1].empty()) throw Error(ErrorCode::EmptyKey, "empty relation");
      Provenance prov;
      if (fields.size() == 4 && !fields[3].empty()) {
        std::size_t s = 0;
        while (s <= fields[3].size()) {
          auto semi = fields[3].find(';', s);
          if (semi == fields[3].npos) semi = fields[3].size();
          auto item = trim(fields[3].substr(s, semi - s));
          s = semi + 1;
          if (item.empty()) continue;
          auto eq = item.find('=');
          if (eq == item.npos) throw Error(ErrorCode::SchemaError, "provenance must be pkey=pvalue");
          prov.push_back({std::string(trim(item.substr(0, eq))), std::string(trim(item.substr(eq + 1)))});
        }
      }
      make_profile(ProfileId("S"), {}, {{std::string(fields[1]), ProfileId("O"), prov}});
      auto object_id = profile_for(fields[2]).id;
      auto& subject = profile_for(fields[0]);
      auto candidate = subject.relations;
      candidate.push_back({std::string(fields[1]), object_id, prov});
      // Validates the new relation before it is kept.
      subject = make_profile(subject.id, subject.attributes, std::move(candidate));
      ++report.accepted;
    } catch (const std::exception& ex) {
      record(report, i + 1, ex);
    }
  }
  for (const auto& [id, p] : touched) engine.put_profile(p);
  return report;
}

}  // namespace provlink
