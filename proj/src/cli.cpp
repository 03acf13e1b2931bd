#include "parisi/cli.hpp"

#include <CLI11.hpp>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>

#include "parisi/oracle.hpp"
#include "parisi/serialize.hpp"

namespace parisi {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

double default_tolerance() {
  const char* env = std::getenv("PARISI_TOL");
  if (!env || !*env) return kDefaultTolerance;
  char* end = nullptr;
  double v = std::strtod(env, &end);
  if (end == env || *end != '\0' || !(v > 0.0) || !std::isfinite(v))
    throw std::invalid_argument(std::string("PARISI_TOL is not a positive number: ") + env);
  return v;
}

struct Row {
  int p, s;
  double lambda;
  std::optional<Classification> c;
  std::string error;
  bool near = false;
};

bool near_boundary(const PhaseBoundaries& b, double lambda) {
  for (const auto& [name, v] : b.list())
    if (std::abs(lambda - v) <= 1e-4) return true;
  return false;
}

std::string csv_row(const Row& r) {
  std::ostringstream os;
  os << r.p << ',' << r.s << ',' << fmt(r.lambda) << ',';
  if (!r.c) {
    os << "Unresolved,," << (r.near ? "near" : "") << ",,,,,,,,,,,,false";
    return os.str();
  }
  const Classification& c = *r.c;
  std::string flags = c.on_boundary ? "on" : (r.near ? "near" : "");
  const PhaseParams& pp = c.params;
  os << to_string(c.phase) << ',' << fmt(c.energy) << ',' << flags << ',' << (c.interval_agrees ? "true" : "false")
     << ',' << fmt(pp.z) << ',' << fmt(pp.q) << ',' << fmt(pp.z1) << ',' << fmt(pp.z2) << ',' << fmt(pp.q1) << ','
     << fmt(pp.q2) << ',' << fmt(pp.qP) << ',' << fmt(c.report.normalization_error) << ',' << fmt(c.report.min_g)
     << ',' << fmt(c.report.support_residual) << ',' << (c.report.pass ? "true" : "false");
  return os.str();
}

Row compute_row(int p, int s, double lambda, double tol) {
  Row r{p, s, lambda, std::nullopt, {}, near_boundary(boundaries(p, s), lambda)};
  try {
    r.c = classify(p, s, lambda, tol);
  } catch (const Unresolved& e) {
    r.error = e.what();
  }
  return r;
}

std::string dat_path(const std::string& csv) {
  auto slash = csv.find_last_of('/');
  auto dot = csv.find_last_of('.');
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) return csv.substr(0, dot) + ".dat";
  return csv + ".dat";
}

struct Common {
  int p = 0, s = 0;
  double lambda = 0.0;
  std::optional<double> tol;
  std::string format = "json";
};

void add_family(CLI::App* cmd, Common& o) {
  cmd->add_option("--p", o.p, "smaller exponent")->required();
  cmd->add_option("--s", o.s, "larger exponent")->required();
}

void add_format(CLI::App* cmd, Common& o) {
  cmd->add_option("--format", o.format, "output format")->check(CLI::IsMember({"json", "csv"}));
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << text;
  if (!f) throw std::runtime_error("failed writing " + path);
}

}  // namespace

std::vector<double> even_grid(double lo, double hi, int count) {
  if (count < 1 || !(hi >= lo)) throw std::invalid_argument("empty lambda grid");
  if (count == 1) return {lo};
  std::vector<double> g(count);
  for (int i = 0; i < count; ++i) g[i] = i + 1 == count ? hi : lo + (hi - lo) * i / (count - 1);
  return g;
}

std::vector<double> parse_lambda_grid(const std::string& text) {
  double lo, hi, step;
  char c1, c2;
  std::istringstream is(text);
  if (!(is >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' || !is.eof())
    throw std::invalid_argument("lambda grid must read lo:hi:step");
  if (!(step > 0.0) || !(hi >= lo)) throw std::invalid_argument("empty lambda grid");
  long n = std::lround(std::floor((hi - lo) / step + 1e-9));
  std::vector<double> g;
  for (long i = 0; i <= n; ++i) g.push_back(std::min(hi, lo + step * static_cast<double>(i)));
  if (hi - g.back() > 1e-9 * step) g.push_back(hi);
  return g;
}

std::string sweep_csv_header() {
  return "p,s,lambda,phase,energy,boundary_flag,interval_agrees,z,q,z1,z2,q1,q2,qP,"
         "normalization_error,min_g,support_residual,pass";
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Zero-temperature Parisi measures of spherical p+s spin glasses", "parisi-zero"};
  app.require_subcommand(1);

  Common o;
  std::string measure_out, measure_in, grid_spec, out_path;
  std::optional<int> count;
  int jobs = 1, kmax = 4, restarts = 16;
  std::uint64_t seed = 1;

  auto* classify_cmd = app.add_subcommand("classify", "classify one mixture and print its certified measure");
  add_family(classify_cmd, o);
  classify_cmd->add_option("--lambda", o.lambda, "weight of the x^p term")->required();
  classify_cmd->add_option("--tol", o.tol, "verifier tolerance");
  add_format(classify_cmd, o);
  classify_cmd->add_option("--measure-out", measure_out, "also write the measure JSON here");

  auto* bounds_cmd = app.add_subcommand("boundaries", "print the regime and phase boundaries");
  add_family(bounds_cmd, o);
  add_format(bounds_cmd, o);

  auto* sweep_cmd = app.add_subcommand("sweep", "classify along a lambda grid");
  add_family(sweep_cmd, o);
  auto* grid_opt = sweep_cmd->add_option("--lambda-grid", grid_spec, "inclusive grid lo:hi:step");
  auto* count_opt = sweep_cmd->add_option("--count", count, "number of evenly spaced points on [0,1]");
  grid_opt->excludes(count_opt);
  sweep_cmd->add_option("--out", out_path, "CSV output path")->required();
  sweep_cmd->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--tol", o.tol, "verifier tolerance");

  auto* verify_cmd = app.add_subcommand("verify", "check a serialized measure against the optimality conditions");
  add_family(verify_cmd, o);
  verify_cmd->add_option("--lambda", o.lambda, "weight of the x^p term")->required();
  verify_cmd->add_option("--measure", measure_in, "measure JSON file")->required();
  verify_cmd->add_option("--tol", o.tol, "verifier tolerance");

  auto* oracle_cmd = app.add_subcommand("oracle", "minimize the energy over step measures");
  add_family(oracle_cmd, o);
  oracle_cmd->add_option("--lambda", o.lambda, "weight of the x^p term")->required();
  oracle_cmd->add_option("--kmax", kmax, "largest number of levels")->check(CLI::Range(0, kMaxLevels));
  oracle_cmd->add_option("--restarts", restarts, "random restarts per level")->check(CLI::PositiveNumber);
  oracle_cmd->add_option("--seed", seed, "random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "parisi-zero: " << e.what() << '\n';
    return 1;
  }

  try {
    double tol = o.tol ? *o.tol : default_tolerance();
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");

    if (*classify_cmd) {
      Row r{o.p, o.s, o.lambda, std::nullopt, {}, false};
      try {
        r.c = classify(o.p, o.s, o.lambda, tol);
      } catch (const Unresolved& e) {
        err << "parisi-zero: unresolved: " << e.what() << '\n';
        return 2;
      }
      r.near = near_boundary(boundaries(o.p, o.s), o.lambda);
      if (!measure_out.empty()) write_file(measure_out, to_json(r.c->measure).dump(2) + "\n");
      if (o.format == "csv") {
        out << kCsvVersionLine << '\n' << sweep_csv_header() << '\n' << csv_row(r) << '\n';
      } else {
        out << to_json(*r.c).dump(2) << '\n';
      }
      return 0;
    }

    if (*bounds_cmd) {
      PhaseBoundaries b = boundaries(o.p, o.s);
      if (o.format == "csv") {
        out << kCsvVersionLine << '\n' << "name,lambda\n";
        out << "regime," << to_string(b.regime.tag) << '\n';
        for (const auto& [name, v] : b.list()) out << name << ',' << fmt(v) << '\n';
      } else {
        out << to_json(b).dump(2) << '\n';
      }
      return 0;
    }

    if (*sweep_cmd) {
      std::vector<double> grid;
      if (count) {
        grid = even_grid(0.0, 1.0, *count);
      } else if (!grid_spec.empty()) {
        grid = parse_lambda_grid(grid_spec);
      } else {
        throw std::invalid_argument("sweep needs --lambda-grid or --count");
      }
      Mixture(o.p, o.s, grid.front());
      boundaries(o.p, o.s);
      std::vector<Row> rows(grid.size());
      std::atomic<std::size_t> next{0};
      auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < grid.size();) rows[i] = compute_row(o.p, o.s, grid[i], tol);
      };
      std::vector<std::thread> pool;
      int n = std::min<int>(jobs, static_cast<int>(grid.size()));
      for (int t = 1; t < n; ++t) pool.emplace_back(worker);
      worker();
      for (auto& t : pool) t.join();

      std::ostringstream csv, dat;
      csv << kCsvVersionLine << '\n' << sweep_csv_header() << '\n';
      dat << "# lambda phase_index energy\n";
      bool unresolved = false;
      for (const Row& r : rows) {
        csv << csv_row(r) << '\n';
        if (r.c) {
          dat << fmt(r.lambda) << ' ' << phase_index(r.c->phase) << ' ' << fmt(r.c->energy) << '\n';
        } else {
          unresolved = true;
          err << "parisi-zero: unresolved at lambda=" << fmt(r.lambda) << ": " << r.error << '\n';
        }
      }
      write_file(out_path, csv.str());
      write_file(dat_path(out_path), dat.str());
      return unresolved ? 2 : 0;
    }

    if (*verify_cmd) {
      Mixture m(o.p, o.s, o.lambda);
      std::ifstream f(measure_in, std::ios::binary);
      if (!f) throw std::invalid_argument("cannot read " + measure_in);
      std::stringstream buf;
      buf << f.rdbuf();
      ParisiMeasure nu = parse_measure(buf.str());
      validate_measure(m, nu);
      VerificationReport rep = verify_parisi(m, nu, tol);
      Json j = to_json(rep);
      j["energy"] = cs_energy(m, nu);
      out << j.dump(2) << '\n';
      return rep.pass ? 0 : 2;
    }

    if (*oracle_cmd) {
      Mixture m(o.p, o.s, o.lambda);
      OracleOptions opts;
      opts.restarts = restarts;
      opts.seed = seed;
      out << to_json(oracle_profile(m, kmax, opts)).dump(2) << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    err << "parisi-zero: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace parisi
