#include "idlab/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "idlab/bench.hpp"
#include "idlab/errors.hpp"
#include "idlab/json_io.hpp"
#include "idlab/manifolds.hpp"
#include "idlab/npy.hpp"
#include "idlab/parallel.hpp"

namespace idlab::cli {

namespace fs = std::filesystem;

namespace {

struct Globals {
  std::uint64_t seed = 42;
  std::size_t threads = 0;
  std::string out_dir = ".";
};

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

fs::path out_path(const Globals& g, const std::string& name) {
  fs::create_directories(g.out_dir);
  return fs::path(g.out_dir) / name;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  if (!out) throw IoError("cannot write " + p.string());
  out << text;
}

std::map<std::string, double> parse_params(const std::vector<std::string>& items) {
  std::map<std::string, double> out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ParameterError("--param expects key=value, got '" + item + "'");
    }
    const std::string value = item.substr(eq + 1);
    try {
      std::size_t used = 0;
      out[item.substr(0, eq)] = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParameterError("--param value '" + value + "' is not a number");
    }
  }
  return out;
}

std::string fmt(double v) {
  if (!std::isfinite(v)) return "";
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

// Kinds caused by bad flags rather than bad data.
bool is_usage(ErrorKind k) { return k == ErrorKind::Parameter || k == ErrorKind::Registry; }

void report(const std::string& kind, const std::string& message, std::optional<std::size_t> index) {
  json j{{"error", kind}, {"message", message}};
  if (index) j["index"] = *index;
  std::cerr << j.dump() << '\n';
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Intrinsic dimension and perplexity measurement toolkit", "idlab"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads (0 = all cores)")->capture_default_str();
  app.add_option("--out-dir", g.out_dir, "Directory for file outputs")->capture_default_str();

  std::function<void()> action;

  // estimate
  std::string input, estimator;
  std::vector<std::string> params;
  auto* est = app.add_subcommand("estimate", "Estimate the intrinsic dimension of a point cloud");
  est->add_option("--input", input, "N x D matrix (.npy)")->required();
  est->add_option("--estimator", estimator, "Estimator name")->required();
  est->add_option("--param", params, "Estimator parameter key=value (repeatable)");
  est->callback([&] {
    action = [&] {
      const auto spec = make_spec(estimator, parse_params(params));
      print(estimate(spec, load_matrix(input)));
    };
  });

  // profile
  std::string manifest;
  auto* prof = app.add_subcommand("profile", "Per-layer ID profile of an extraction run");
  prof->add_option("--manifest", manifest, "Run manifest (.json)")->required();
  prof->add_option("--estimator", estimator, "Estimator name")->required();
  prof->add_option("--param", params, "Estimator parameter key=value (repeatable)");
  prof->callback([&] {
    action = [&] {
      const auto spec = make_spec(estimator, parse_params(params));
      const auto m = load_manifest(manifest);
      const auto p = profile(load_layer_stack(m), spec, m.dataset_id, m.model_id);
      print(json{{"profile", p}, {"aggregate", aggregate(p)}});
    };
  });

  // converge
  std::vector<std::size_t> sizes;
  std::vector<std::uint64_t> seeds;
  std::string csv_name = "convergence.csv";
  auto* conv = app.add_subcommand("converge", "ID estimates over subsample sizes");
  conv->add_option("--input", input, "N x D matrix (.npy)")->required();
  conv->add_option("--estimator", estimator, "Estimator name")->required();
  conv->add_option("--param", params, "Estimator parameter key=value (repeatable)");
  conv->add_option("--sizes", sizes, "Subsample sizes")->required()->delimiter(',');
  conv->add_option("--seeds", seeds, "Subsample seeds (default: seed, seed+1, seed+2)")->delimiter(',');
  conv->add_option("--csv", csv_name, "Plot-data file name inside --out-dir")->capture_default_str();
  conv->callback([&] {
    action = [&] {
      const auto spec = make_spec(estimator, parse_params(params));
      if (seeds.empty()) seeds = {g.seed, g.seed + 1, g.seed + 2};
      const auto curve = convergence(load_matrix(input), spec, sizes, seeds);
      std::ostringstream csv;
      csv << "estimator,size,mean_id,std_id,lower,upper\n";
      for (std::size_t i = 0; i < curve.sizes.size(); ++i) {
        const double m = curve.mean_id[i], s = curve.std_id[i];
        csv << spec.name << ',' << curve.sizes[i] << ',' << fmt(m) << ',' << fmt(s) << ','
            << fmt(m - s) << ',' << fmt(m + s) << '\n';
      }
      write_text(out_path(g, csv_name), csv.str());
      print(curve);
    };
  });

  // generate
  std::string family, name;
  std::size_t d = 0, ambient = 0, n = 0;
  double noise = 0.0;
  auto* gen = app.add_subcommand("generate", "Sample a synthetic manifold with known dimension");
  gen->add_option("--family", family, "uniform_ball|uniform_cube|sphere_surface|swiss_roll|linear_subspace|gaussian_blob")->required();
  gen->add_option("--d", d, "Intrinsic dimension")->required();
  gen->add_option("--ambient", ambient, "Ambient dimension")->required();
  gen->add_option("--n", n, "Number of points")->required();
  gen->add_option("--noise", noise, "Isotropic Gaussian noise sigma")->capture_default_str();
  gen->add_option("--name", name, "Output stem (default derived from the flags)");
  gen->callback([&] {
    action = [&] {
      const ManifoldSpec spec{parse_manifold_family(family), d, ambient, n, noise, g.seed};
      const auto out = generate(spec);
      if (name.empty()) {
        name = family + "_d" + std::to_string(d) + "_D" + std::to_string(ambient) + "_n" +
               std::to_string(n);
      }
      const auto npy_path = out_path(g, name + ".npy");
      save_matrix(out.cloud, npy_path);
      json side{{"family", family},        {"d_intrinsic", d},        {"d_ambient", ambient},
                {"n", n},                  {"noise_sigma", noise},    {"seed", g.seed},
                {"ground_truth_id", out.ground_truth_id},             {"cloud", npy_path.string()}};
      write_text(out_path(g, name + ".json"), side.dump(2) + "\n");
      print(side);
    };
  });

  // transform
  std::string tokens, mode, output;
  bool inverse = false;
  auto* tr = app.add_subcommand("transform", "Apply a structure ablation to a token dataset");
  tr->add_option("--tokens", tokens, "Token dataset (.jsonl)")->required();
  tr->add_option("--mode", mode, "permuted|swapped|random")
      ->required()
      ->check(CLI::IsMember({"permuted", "swapped", "random"}));
  tr->add_flag("--inverse", inverse, "Apply the inverse vocabulary bijection (swapped only)");
  tr->add_option("--output", output, "Output path (default <out-dir>/<stem>.<mode>.jsonl)");
  tr->callback([&] {
    action = [&] {
      if (inverse && mode != "swapped") throw ParameterError("--inverse only applies to swapped");
      const auto data = load_tokens(tokens);
      TokenDataset out = mode == "permuted" ? transform_permuted(data, g.seed)
                         : mode == "swapped" ? transform_swapped(data, g.seed, inverse)
                                             : transform_random(data, g.seed);
      const fs::path dest = output.empty()
                                ? out_path(g, fs::path(tokens).stem().string() + "." + mode + ".jsonl")
                                : fs::path(output);
      save_tokens(dest, out);
      print(json{{"output", dest.string()}, {"header", header_path_for(dest).string()},
                 {"mode", mode}, {"inverse", inverse}, {"seed", g.seed},
                 {"before", descriptors(data)}, {"after", descriptors(out)}});
    };
  });

  // describe
  auto* desc = app.add_subcommand("describe", "Shallow descriptors of a token dataset");
  desc->add_option("--tokens", tokens, "Token dataset (.jsonl)")->required();
  desc->callback([&] { action = [&] { print(descriptors(load_tokens(tokens))); }; });

  // ppl
  std::string nll;
  auto* ppl = app.add_subcommand("ppl", "Perplexity and coding length from per-token NLLs");
  ppl->add_option("--nll", nll, "NLL records (.jsonl, nats)")->required();
  ppl->add_option("--tokens", tokens, "Token dataset to check alignment against");
  ppl->callback([&] {
    action = [&] {
      const auto rec = load_nll(nll);
      if (!tokens.empty()) {
        const auto data = load_tokens(tokens);
        if (data.sequences.size() != rec.sequences.size()) {
          throw ConsistencyError("token file has " + std::to_string(data.sequences.size()) +
                                 " sequences, nll file " + std::to_string(rec.sequences.size()));
        }
        for (std::size_t i = 0; i < rec.sequences.size(); ++i) {
          if (rec.sequences[i].size() + 1 != data.sequences[i].size()) {
            throw ConsistencyError("sequence " + std::to_string(i) +
                                       ": expected one nll per token after the first",
                                   i);
          }
        }
      }
      print(dataset_ppl(rec));
    };
  });

  // adapt
  std::string log_path;
  std::size_t patience = 3;
  auto* ad = app.add_subcommand("adapt", "Convergence step, final PPL and sample complexity");
  ad->add_option("--log", log_path, "Evaluation log (.csv: step,eval_ppl)")->required();
  ad->add_option("--patience", patience, "Evaluations without improvement")->capture_default_str();
  ad->callback([&] { action = [&] { print(adaptation_metrics(load_adaptation_log(log_path), patience)); }; });

  // correlate
  std::string table_path;
  double alpha = 0.1;
  bool linkage = false;
  auto* cor = app.add_subcommand("correlate", "Spearman correlation matrix with significance mask");
  cor->add_option("--table", table_path, "Metric table (.csv, first column dataset_id)")->required();
  cor->add_option("--alpha", alpha, "Significance level")->capture_default_str();
  cor->add_flag("--linkage", linkage, "Add the ID/PPL/adaptation linkage report");
  cor->callback([&] {
    action = [&] {
      const auto t = load_metric_table(table_path);
      const auto m = correlation_matrix(t, alpha);
      std::ostringstream csv;
      csv << "x,y,rho,p_value,n,masked\n";
      for (std::size_t a = 0; a < m.columns.size(); ++a) {
        for (std::size_t b = 0; b < m.columns.size(); ++b) {
          csv << m.columns[a] << ',' << m.columns[b] << ',';
          if (m.cells[a][b]) {
            csv << fmt(m.cells[a][b]->rho) << ',' << fmt(m.cells[a][b]->p_value) << ','
                << m.cells[a][b]->n;
          } else {
            csv << ",,";
          }
          csv << ',' << (m.masked[a][b] ? 1 : 0) << '\n';
        }
      }
      write_text(out_path(g, "correlation.csv"), csv.str());
      json j = m;
      if (linkage) j["linkage"] = linkage_report(t);
      print(j);
    };
  });

  // bench
  BenchOptions bo;
  auto* be = app.add_subcommand("bench", "Estimator accuracy matrix over the manifold suite");
  be->add_option("--n", bo.n, "Points per manifold")->capture_default_str();
  be->add_option("--ambient", bo.ambient, "Ambient dimension")->capture_default_str();
  be->callback([&] {
    action = [&] {
      bo.seed = g.seed;
      const auto cells = run_bench(bo);
      std::size_t passed = 0;
      std::ostringstream csv;
      csv << "family,d,estimator,truth,value,tolerance,pass\n";
      for (const auto& c : cells) {
        passed += c.pass ? 1 : 0;
        csv << c.family << ',' << c.d << ',' << c.estimator << ',' << fmt(c.truth) << ','
            << fmt(c.value) << ',' << fmt(c.tolerance) << ',' << (c.pass ? 1 : 0) << '\n';
      }
      write_text(out_path(g, "bench.csv"), csv.str());
      print(json{{"cells", cells}, {"passed", passed}, {"total", cells.size()},
                 {"all_pass", passed == cells.size()}});
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report("UsageError", e.what(), std::nullopt);
    return 2;
  }

  try {
    set_thread_count(g.threads);
    action();
    return 0;
  } catch (const Error& e) {
    report(std::string(to_string(e.kind())), e.what(), e.index());
    return is_usage(e.kind()) ? 2 : 1;
  } catch (const fs::filesystem_error& e) {
    report("IoError", e.what(), std::nullopt);
    return 1;
  } catch (const std::exception& e) {
    report("InternalError", e.what(), std::nullopt);
    return 1;
  }
}

}  // namespace idlab::cli
