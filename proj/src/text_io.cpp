#include <fstream>
#include <sstream>

#include "idlab/errors.hpp"
#include "idlab/textstats.hpp"
#include "json.hpp"

namespace idlab {

using nlohmann::json;

namespace {

std::ifstream open_in(const std::filesystem::path& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw IoError(std::string("cannot open ") + what + " " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path, const char* what) {
  std::ofstream out(path);
  if (!out) throw IoError(std::string("cannot write ") + what + " " + path.string());
  return out;
}

// Calls fn(line_json, record_index) for each non-blank line.
template <typename F>
void for_each_jsonl(const std::filesystem::path& path, const char* what, F&& fn) {
  auto in = open_in(path, what);
  std::string line;
  std::size_t lineno = 0;
  std::size_t record = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw FormatError(path.string() + " line " + std::to_string(lineno) + ": " + e.what(),
                        record);
    }
    try {
      fn(j, record);
    } catch (const json::exception& e) {
      throw SchemaError(path.string() + " line " + std::to_string(lineno) + ": " + e.what(),
                        record);
    }
    ++record;
  }
}

std::optional<json> load_header(const std::filesystem::path& data_path) {
  const auto hp = header_path_for(data_path);
  if (!std::filesystem::exists(hp)) return std::nullopt;
  auto in = open_in(hp, "header");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError("header " + hp.string() + " is not valid JSON: " + e.what());
  }
}

}  // namespace

std::filesystem::path header_path_for(const std::filesystem::path& data_path) {
  auto p = data_path;
  p.replace_extension(".header.json");
  return p;
}

TokenDataset load_tokens(const std::filesystem::path& path) {
  TokenDataset d;
  for_each_jsonl(path, "token file", [&](const json& j, std::size_t) {
    d.sequences.push_back(j.at("ids").get<std::vector<TokenId>>());
  });
  if (auto h = load_header(path)) {
    try {
      d.vocab_bound = h->at("vocab_bound").get<TokenId>();
      for (const auto& s : h->value("special_tokens", json::array())) {
        d.special_tokens.insert(s.get<TokenId>());
      }
    } catch (const json::exception& e) {
      throw SchemaError("header " + header_path_for(path).string() + ": " + e.what());
    }
  } else {
    // No header: the bound is one past the largest id and nothing is special.
    TokenId hi = -1;
    for (const auto& s : d.sequences) {
      for (TokenId t : s) hi = std::max(hi, t);
    }
    d.vocab_bound = hi + 1;
  }
  d.validate();
  return d;
}

void save_tokens(const std::filesystem::path& path, const TokenDataset& dataset) {
  {
    auto out = open_out(path, "token file");
    for (const auto& s : dataset.sequences) out << json{{"ids", s}}.dump() << '\n';
  }
  auto out = open_out(header_path_for(path), "header");
  json h{{"vocab_bound", dataset.vocab_bound},
         {"special_tokens", std::vector<TokenId>(dataset.special_tokens.begin(),
                                                 dataset.special_tokens.end())}};
  out << h.dump() << '\n';
}

NllRecord load_nll(const std::filesystem::path& path) {
  if (auto h = load_header(path)) {
    const auto units = h->value("units", std::string("nats"));
    const auto conv = h->value("convention", std::string("skip-first-token"));
    if (units != "nats") throw SchemaError("nll units must be nats, got '" + units + "'");
    if (conv != "skip-first-token") {
      throw SchemaError("unsupported nll convention '" + conv + "'");
    }
  }
  NllRecord r;
  for_each_jsonl(path, "nll file", [&](const json& j, std::size_t i) {
    auto v = j.at("nll").get<std::vector<double>>();
    for (double x : v) {
      if (!(x >= 0.0) || !std::isfinite(x)) {
        throw DataError("nll record " + std::to_string(i) + " has a negative or non-finite value",
                        i);
      }
    }
    r.sequences.push_back(std::move(v));
  });
  return r;
}

void save_nll(const std::filesystem::path& path, const NllRecord& records) {
  {
    auto out = open_out(path, "nll file");
    for (const auto& s : records.sequences) out << json{{"nll", s}}.dump() << '\n';
  }
  auto out = open_out(header_path_for(path), "header");
  out << json{{"units", "nats"}, {"convention", "skip-first-token"}}.dump() << '\n';
}

AdaptationLog load_adaptation_log(const std::filesystem::path& path) {
  auto in = open_in(path, "adaptation log");
  AdaptationLog log;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (line.front() == '#') {
      const auto pos = line.find("eval_interval=");
      if (pos != std::string::npos) {
        try {
          log.eval_interval = std::stoll(line.substr(pos + 14));
        } catch (const std::exception&) {
          throw FormatError(path.string() + " line " + std::to_string(lineno) +
                            ": bad eval_interval");
        }
      }
      continue;
    }
    if (!header_seen) {
      header_seen = true;
      if (line.rfind("step", 0) == 0) {
        if (line != "step,eval_ppl") {
          throw SchemaError(path.string() + ": expected columns step,eval_ppl, got '" + line + "'");
        }
        continue;
      }
    }
    std::istringstream row(line);
    std::string a, b;
    if (!std::getline(row, a, ',') || !std::getline(row, b)) {
      throw FormatError(path.string() + " line " + std::to_string(lineno) + ": expected 2 fields");
    }
    try {
      std::size_t used_a = 0, used_b = 0;
      log.steps.push_back(std::stoll(a, &used_a));
      log.eval_ppl.push_back(std::stod(b, &used_b));
      if (used_a != a.size() || used_b != b.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw FormatError(path.string() + " line " + std::to_string(lineno) + ": bad number");
    }
  }
  log.validate();
  return log;
}

void save_adaptation_log(const std::filesystem::path& path, const AdaptationLog& log) {
  auto out = open_out(path, "adaptation log");
  out << "# eval_interval=" << log.eval_interval << "\nstep,eval_ppl\n";
  out.precision(17);
  for (std::size_t t = 0; t < log.steps.size(); ++t) {
    out << log.steps[t] << ',' << log.eval_ppl[t] << '\n';
  }
}

}  // namespace idlab
