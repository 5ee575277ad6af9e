#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "pxflow/experiments.hpp"
#include "pxflow/vtk.hpp"

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string csv_name(const std::string& element, int case_id, double p_minus, double alpha) {
  std::ostringstream os;
  os << "converge_" << element << "_case" << case_id << "_p" << fmt_short(p_minus) << "_a"
     << fmt_short(alpha) << ".csv";
  return os.str();
}

void write_csv(const std::string& path, const pxf::StudyResult& res) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << "level,h,e_v,eoc_v,e_q,eoc_q,theory_v,theory_q\n";
  for (const auto& r : res.records) {
    out << r.level << ',' << fmt17(r.h) << ',' << fmt17(r.e_v) << ',';
    if (r.eoc_v) out << fmt17(*r.eoc_v);
    out << ',' << fmt17(r.e_q) << ',';
    if (r.eoc_q) out << fmt17(*r.eoc_q);
    out << ',' << fmt17(r.theory_v) << ',' << fmt17(r.theory_q) << '\n';
  }
}

void print_table(std::ostream& os, const std::string& element, const pxf::ManufacturedCase& mc,
                 const pxf::StudyResult& res) {
  char line[160];
  os << element << ", Case " << mc.case_id() << ", alpha=" << fmt_short(mc.alpha())
     << " beta=" << fmt_short(mc.beta()) << " gamma=" << fmt_short(mc.gamma())
     << ", p^- = " << fmt_short(mc.p_minus()) << ", p^+ = " << fmt_short(mc.p_plus()) << "\n";
  std::snprintf(line, sizeof line, "%4s %12s %14s %10s %14s %10s\n", "i", "h", "e_v", "EOC",
                "e_q", "EOC");
  os << line;
  for (const auto& r : res.records) {
    std::string ev_eoc = r.eoc_v ? (std::snprintf(line, sizeof line, "%.3f", *r.eoc_v), line)
                                 : std::string("--");
    std::string eq_eoc = r.eoc_q ? (std::snprintf(line, sizeof line, "%.3f", *r.eoc_q), line)
                                 : std::string("--");
    char row[160];
    std::snprintf(row, sizeof row, "%4d %12.4e %14.6e %10s %14.6e %10s\n", r.level, r.h, r.e_v,
                  ev_eoc.c_str(), r.e_q, eq_eoc.c_str());
    os << row;
  }
  std::snprintf(line, sizeof line, "%4s %12s %14s %10.3f %14s %10.3f\n", "thry", "", "",
                res.records.empty() ? 0.0 : res.records.back().theory_v, "",
                res.records.empty() ? 0.0 : res.records.back().theory_q);
  os << line;
  if (res.aborted) os << "ABORTED: " << res.abort_reason << "\n";
}

struct ConvergeJob {
  pxf::ManufacturedCase mc;
  pxf::MixedPair pair;
  std::string element;
  int levels;
  bool stability;
  std::string out_dir;
};

int run_converge_jobs(const std::vector<ConvergeJob>& jobs, int n_threads) {
  std::mutex io_mtx;
  std::atomic<int> failures{0};
  std::atomic<size_t> next{0};

  auto worker = [&]() {
    while (true) {
      const size_t k = next.fetch_add(1);
      if (k >= jobs.size()) return;
      const ConvergeJob& job = jobs[k];
      pxf::StudyOptions opts;
      opts.compute_stability = job.stability;
      std::ostringstream console;
      try {
        const pxf::StudyResult res = pxf::run_convergence_study(job.mc, job.pair, job.levels, opts);
        std::filesystem::create_directories(job.out_dir);
        const std::string path =
            job.out_dir + "/" +
            csv_name(job.element, job.mc.case_id(), job.mc.p_minus(), job.mc.alpha());
        write_csv(path, res);
        print_table(console, job.element, job.mc, res);
        console << "csv: " << path << "\n";
        if (res.aborted) failures.fetch_add(1);
      } catch (const std::exception& e) {
        console << "error: " << e.what() << "\n";
        failures.fetch_add(1);
      }
      std::lock_guard<std::mutex> lock(io_mtx);
      std::cout << console.str() << std::endl;
    }
  };

  if (n_threads <= 1 || jobs.size() <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    const int n = std::min<int>(n_threads, static_cast<int>(jobs.size()));
    for (int i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return failures.load() == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"steady p(.)-Navier-Stokes finite element solver and convergence harness"};
  app.require_subcommand(1);

  // converge
  auto* conv = app.add_subcommand("converge", "manufactured-solution convergence study");
  std::string config_path;
  std::string element = "mini";
  std::string p_minus_csv = "2.0";
  double alpha = 1.0, beta = 1.0, gamma = 1.0;
  int case_id = 1;
  int levels = 6;
  double delta = 1e-5, mu0 = 0.5;
  std::string out_dir = ".";
  int jobs = 1;
  bool stability = false;
  conv->add_option("--config", config_path, "key=value file; command line flags take precedence");
  conv->add_option("--element", element, "mini or taylor-hood");
  conv->add_option("--p-minus", p_minus_csv, "p^- values (comma separated for batch runs)");
  conv->add_option("--alpha", alpha, "Hoelder exponent of p(.)");
  conv->add_option("--beta", beta, "velocity regularity exponent");
  conv->add_option("--gamma", gamma, "pressure regularity exponent");
  conv->add_option("--case", case_id, "pressure regularity regime (1 or 2)");
  conv->add_option("--levels", levels, "finest refinement level (0..9)");
  conv->add_option("--delta", delta, "shear regularization");
  conv->add_option("--mu0", mu0, "viscosity factor");
  conv->add_option("--out", out_dir, "output directory for CSV files");
  conv->add_option("--jobs", jobs, "parallel independent configurations");
  conv->add_flag("--stability", stability, "also record the Luxemburg-norm stability proxy");

  // er-demo
  auto* er = app.add_subcommand("er-demo", "electro-rheological flow demo");
  std::string mesh_path;
  std::string er_out = ".";
  bool no_field = false;
  er->add_option("--mesh", mesh_path, "two-hole electrode mesh (node/ele format)")->required();
  er->add_option("--out", er_out, "output directory for VTK files");
  er->add_flag("--no-field", no_field, "only run the comparison case without the electric field");

  // mesh-info
  auto* info = app.add_subcommand("mesh-info", "print mesh statistics");
  std::string info_path;
  info->add_option("file", info_path, "mesh file (node/ele format)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (conv->parsed()) {
      if (!config_path.empty()) {
        // key=value file supplies defaults; command-line flags win
        std::ifstream cfg(config_path);
        if (!cfg) throw CLI::ValidationError("--config", "cannot open '" + config_path + "'");
        std::string line;
        int lineno = 0;
        while (std::getline(cfg, line)) {
          ++lineno;
          const auto hash = line.find('#');
          if (hash != std::string::npos) line.erase(hash);
          const auto strip = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
          };
          if (strip(line).empty()) continue;
          const auto eq = line.find('=');
          if (eq == std::string::npos)
            throw CLI::ValidationError("--config", "line " + std::to_string(lineno) +
                                                       ": expected key=value");
          const std::string key = strip(line.substr(0, eq));
          const std::string value = strip(line.substr(eq + 1));
          const auto given = [&](const std::string& flag) { return conv->count(flag) > 0; };
          try {
            if (key == "element" && !given("--element")) element = value;
            else if (key == "p-minus" && !given("--p-minus")) p_minus_csv = value;
            else if (key == "alpha" && !given("--alpha")) alpha = std::stod(value);
            else if (key == "beta" && !given("--beta")) beta = std::stod(value);
            else if (key == "gamma" && !given("--gamma")) gamma = std::stod(value);
            else if (key == "case" && !given("--case")) case_id = std::stoi(value);
            else if (key == "levels" && !given("--levels")) levels = std::stoi(value);
            else if (key == "delta" && !given("--delta")) delta = std::stod(value);
            else if (key == "mu0" && !given("--mu0")) mu0 = std::stod(value);
            else if (key == "out" && !given("--out")) out_dir = value;
            else if (key == "jobs" && !given("--jobs")) jobs = std::stoi(value);
            else if (key == "stability" && !given("--stability")) stability = value == "true";
            else if (key != "element" && key != "p-minus" && key != "alpha" && key != "beta" &&
                     key != "gamma" && key != "case" && key != "levels" && key != "delta" &&
                     key != "mu0" && key != "out" && key != "jobs" && key != "stability")
              throw CLI::ValidationError("--config", "unknown key '" + key + "'");
          } catch (const std::invalid_argument&) {
            throw CLI::ValidationError("--config", "bad value for '" + key + "'");
          }
        }
      }

      if (element != "mini" && element != "taylor-hood")
        throw CLI::ValidationError("--element", "must be mini or taylor-hood");
      for (auto [name, v] : {std::pair<const char*, double>{"--alpha", alpha},
                             {"--beta", beta},
                             {"--gamma", gamma}})
        if (!(v > 0.0 && v <= 1.0))
          throw CLI::ValidationError(name, "must lie in (0, 1]");
      if (case_id != 1 && case_id != 2) throw CLI::ValidationError("--case", "must be 1 or 2");
      if (levels < 0 || levels > 9) throw CLI::ValidationError("--levels", "must lie in [0, 9]");
      if (delta < 0.0) throw CLI::ValidationError("--delta", "must be nonnegative");
      if (!(mu0 > 0.0)) throw CLI::ValidationError("--mu0", "must be positive");
      if (jobs < 1) throw CLI::ValidationError("--jobs", "must be at least 1");

      std::vector<double> p_minus_list;
      std::stringstream ss(p_minus_csv);
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        try {
          p_minus_list.push_back(std::stod(tok));
        } catch (const std::exception&) {
          throw CLI::ValidationError("--p-minus", "bad value '" + tok + "'");
        }
      }
      if (p_minus_list.empty()) throw CLI::ValidationError("--p-minus", "no values given");

      std::vector<ConvergeJob> batch;
      const pxf::MixedPair pair =
          element == "mini" ? pxf::MixedPair::mini() : pxf::MixedPair::taylor_hood();
      for (double pm : p_minus_list) {
        if (!(pm > 1.0)) throw CLI::ValidationError("--p-minus", "p^- must exceed 1");
        batch.push_back({pxf::ManufacturedCase::make(case_id, alpha, beta, gamma, pm, delta, mu0),
                         pair, element, levels, stability, out_dir});
      }
      return run_converge_jobs(batch, jobs);
    }

    if (er->parsed()) {
      const pxf::Triangulation mesh = pxf::import_mesh(mesh_path);
      const pxf::ERDemoResult res = pxf::run_er_demo(mesh, er_out, !no_field, true);
      if (no_field) std::cout << "no-field case: p = p_hat(0) = 4 on the whole domain\n";
      auto report = [](const char* tag, const pxf::ERRunResult& r) {
        std::cout << tag << ": newton " << r.report.iterations << " iterations, "
                  << (r.report.converged ? "converged" : "NOT converged")
                  << ", max|v| = " << fmt17(r.max_speed) << ", <q> = " << fmt17(r.pressure_mean)
                  << "\n";
        for (const auto& f : r.files) std::cout << "  wrote " << f << "\n";
      };
      bool ok = true;
      if (!no_field) {
        report("with field   ", res.with_field);
        ok = ok && res.with_field.report.converged;
      }
      report("without field", res.no_field);
      ok = ok && res.no_field.report.converged;
      if (!no_field) {
        std::cout << "max|v| (field) < max|v| (no field): "
                  << (res.with_field.max_speed < res.no_field.max_speed ? "yes" : "NO") << "\n";
      }
      return ok ? 0 : 1;
    }

    if (info->parsed()) {
      const pxf::Triangulation m = pxf::import_mesh(info_path, /*validate=*/false);
      std::string reason;
      const bool conforming = m.is_conforming(&reason);
      std::cout << "vertices:   " << m.n_vertices() << "\n";
      std::cout << "triangles:  " << m.n_triangles() << "\n";
      std::cout << "max h:      " << fmt17(m.max_h()) << "\n";
      std::cout << "min angle:  " << fmt17(m.min_angle_deg()) << " deg\n";
      std::cout << "area:       " << fmt17(m.total_area()) << "\n";
      std::map<int, int> markers;
      for (const auto& be : m.boundary_edges()) markers[be.marker]++;
      std::cout << "boundary:   " << m.boundary_edges().size() << " edges, markers:";
      for (const auto& [mk, count] : markers) std::cout << ' ' << mk << " (x" << count << ")";
      std::cout << "\n";
      std::cout << "conformity: " << (conforming ? "OK" : "FAIL") << (reason.empty() ? "" : " - ")
                << reason << "\n";
      return 0;
    }
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
