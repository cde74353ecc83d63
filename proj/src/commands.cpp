#include "spinqec/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "spinqec/counter_rng.hpp"
#include "spinqec/parallel.hpp"
#include "spinqec/protocols.hpp"

namespace spinqec {

namespace fs = std::filesystem;
using nlohmann::json;

std::string csv_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

class CsvFile {
 public:
  CsvFile(const fs::path& path, const std::string& header) : out_(path) {
    if (!out_) throw std::runtime_error("cannot open " + path.string());
    out_ << header << "\n";
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ",";
      out_ << cells[i];
    }
    out_ << "\n";
  }

 private:
  std::ofstream out_;
};

struct Timer {
  std::chrono::steady_clock::time_point start =
      std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
  }
};

fs::path prepare_out_dir(const RunConfig& cfg) {
  fs::path dir(cfg.out_dir);
  fs::create_directories(dir);
  return dir;
}

void write_summary(const fs::path& dir, const std::string& command,
                   const json& params, const json& results,
                   const std::vector<std::string>& outputs, double seconds) {
  json summary;
  summary["command"] = command;
  summary["parameters"] = params;
  summary["results"] = results;
  summary["outputs"] = outputs;
  summary["wall_time_s"] = seconds;
  std::ofstream out(dir / (command + "_summary.json"));
  out << summary.dump(2) << "\n";
}

int receiver_site(const RunConfig& cfg) { return cfg.r > 0 ? cfg.r : cfg.n; }

double disorder_time(const RunConfig& cfg, const SubspaceHamiltonian& h,
                     int s, int r) {
  if (cfg.t_fixed > 0.0) return cfg.t_fixed;
  const double window = disorder_time_window(cfg.n, cfg.coupling);
  return find_optimal_time(h, s, r, window, cfg.coarse_step).t_star;
}

json base_params(const RunConfig& cfg) {
  return json{{"seed", cfg.seed}, {"threads", cfg.threads}, {"n", cfg.n}};
}

}  // namespace

int run_transfer(const RunConfig& cfg) {
  Timer timer;
  set_max_threads(cfg.threads);
  const fs::path dir = prepare_out_dir(cfg);
  const int r = receiver_site(cfg);

  const SubspaceHamiltonian h(ideal_xxx_spec(cfg.n, cfg.coupling));

  CsvFile csv(dir / "transfer.csv", "t,re_f,im_f,abs_f,p,fmin_noqec");
  const auto steps = static_cast<std::size_t>(cfg.scan_t_end / cfg.scan_dt);
  for (std::size_t i = 1; i <= steps; ++i) {
    const double t = i * cfg.scan_dt;
    const TransitionAmplitude f = transition_amplitude(h, cfg.s, r, t);
    csv.row({csv_double(t), csv_double(f.value.real()),
             csv_double(f.value.imag()), csv_double(f.magnitude),
             csv_double(f.damping), csv_double(worst_case_fidelity_noqec(f))});
  }

  json params = base_params(cfg);
  params["s"] = cfg.s;
  params["r"] = r;
  params["dt"] = cfg.scan_dt;
  params["t_end"] = cfg.scan_t_end;
  write_summary(dir, "transfer", params, json{{"rows", steps}},
                {"transfer.csv"}, timer.seconds());
  return 0;
}

int run_fig2(const RunConfig& cfg) {
  Timer timer;
  set_max_threads(cfg.threads);
  const fs::path dir = prepare_out_dir(cfg);

  std::vector<int> ns;
  for (int n = std::max(2, cfg.n_min); n <= cfg.n_max; ++n) ns.push_back(n);
  LengthSweepOptions opts;
  opts.t_max = cfg.t_max;
  opts.coarse_step = cfg.coarse_step;
  const auto records = fidelity_vs_length(ns, opts);

  CsvFile csv(dir / "fig2.csv", "N,t_star,f_sq,fmin_4q,fmin_5q");
  for (std::size_t i = 0; i + 1 < records.size(); i += 2) {
    const auto& four = records[i];
    const auto& five = records[i + 1];
    csv.row({std::to_string(four.n), csv_double(*four.t_star),
             csv_double(*four.f_sq), csv_double(*four.f2_min),
             csv_double(*five.f2_min)});
  }

  json params = base_params(cfg);
  params["n_min"] = cfg.n_min;
  params["n_max"] = cfg.n_max;
  params["t_max"] = cfg.t_max;
  write_summary(dir, "fig2", params, json{{"rows", ns.size()}}, {"fig2.csv"},
                timer.seconds());
  return 0;
}

int run_fig3(const RunConfig& cfg) {
  Timer timer;
  set_max_threads(cfg.threads);
  const fs::path dir = prepare_out_dir(cfg);
  const CodeId code = cfg.code == "five" ? CodeId::kFive : CodeId::kFour;

  CsvFile csv(dir / "fig3.csv",
              "L,k,t_star_segment,p_segment,f2_repeated_qec,"
              "f2_noqec_stitched,p_new_closed_form,f2_closed_form");
  for (int length : cfg.lengths) {
    const ExperimentRecord rec =
        repeated_qec_fidelity(length, cfg.segment, code, cfg.t_max);
    csv.row({std::to_string(length), std::to_string(rec.k_segments),
             csv_double(*rec.t_star), csv_double(*rec.p_segment),
             csv_double(*rec.f2_min), csv_double(*rec.f2_noqec_stitched),
             csv_double(*rec.p_new_closed_form),
             csv_double(*rec.f2_closed_form)});
  }

  json params = base_params(cfg);
  params["segment"] = cfg.segment;
  params["code"] = cfg.code;
  params["lengths"] = cfg.lengths;
  write_summary(dir, "fig3", params, json{{"rows", cfg.lengths.size()}},
                {"fig3.csv"}, timer.seconds());
  return 0;
}

int run_dist(const RunConfig& cfg) {
  Timer timer;
  set_max_threads(cfg.threads);
  const fs::path dir = prepare_out_dir(cfg);
  const int r = receiver_site(cfg);

  const ChainSpec base = ideal_xxx_spec(cfg.n, cfg.coupling);
  const SubspaceHamiltonian h(base);
  const double t = disorder_time(cfg, h, cfg.s, r);
  const DysonCoefficients coeffs =
      dyson_first_order_coeffs(base, cfg.s, r, t);

  DisorderModel model{cfg.delta, cfg.coupling, cfg.m, cfg.seed};
  const int bonds = cfg.n - 1;
  std::vector<Complex> exact(cfg.m), pert(cfg.m);
  parallel_for(static_cast<std::size_t>(cfg.m), [&](std::size_t i) {
    exact[i] =
        exact_disordered_amplitude(base, model, i, cfg.s, r, t).value;
    Eigen::VectorXd deltas(bonds);
    for (int k = 0; k < bonds; ++k) {
      deltas[k] = counter_uniform_symmetric(cfg.seed, i, k, cfg.delta);
    }
    pert[i] = perturbative_amplitude(coeffs, deltas);
  });

  json results;
  CsvFile hist(dir / "dist_hist.csv",
               "component,bin_lo,bin_hi,density_exact,density_perturbative");
  CsvFile analytic(dir / "dist_analytic.csv", "component,x,density,cdf");

  for (const Component comp : {Component::kRe, Component::kIm}) {
    const char* name = comp == Component::kRe ? "re" : "im";
    auto pick = [comp](Complex z) {
      return comp == Component::kRe ? z.real() : z.imag();
    };

    std::vector<double> ex(cfg.m), pe(cfg.m);
    for (int i = 0; i < cfg.m; ++i) {
      ex[i] = pick(exact[i]);
      pe[i] = pick(pert[i]);
    }

    const AmplitudeDistribution dist = analytic_density(coeffs, cfg.delta,
                                                        comp);

    // shared binning covering both samples
    double lo = std::min(*std::min_element(ex.begin(), ex.end()),
                         *std::min_element(pe.begin(), pe.end()));
    double hi = std::max(*std::max_element(ex.begin(), ex.end()),
                         *std::max_element(pe.begin(), pe.end()));
    lo = std::min(lo, dist.support_lo());
    hi = std::max(hi, dist.support_hi());
    const double width = (hi - lo) / cfg.bins;
    std::vector<double> count_ex(cfg.bins, 0.0), count_pe(cfg.bins, 0.0);
    auto bin_of = [&](double x) {
      int b = static_cast<int>((x - lo) / width);
      return std::clamp(b, 0, cfg.bins - 1);
    };
    for (double x : ex) count_ex[bin_of(x)] += 1.0;
    for (double x : pe) count_pe[bin_of(x)] += 1.0;
    for (int b = 0; b < cfg.bins; ++b) {
      hist.row({name, csv_double(lo + b * width),
                csv_double(lo + (b + 1) * width),
                csv_double(count_ex[b] / (cfg.m * width)),
                csv_double(count_pe[b] / (cfg.m * width))});
    }

    const int curve_points = 512;
    for (int i = 0; i <= curve_points; ++i) {
      const double x = dist.support_lo() +
                       (dist.support_hi() - dist.support_lo()) * i /
                           curve_points;
      analytic.row({name, csv_double(x), csv_double(dist.density(x)),
                    csv_double(dist.cdf(x))});
    }

    // KS distance: analytic CDF vs perturbative Monte Carlo
    std::sort(pe.begin(), pe.end());
    double ks = 0.0;
    for (int i = 0; i < cfg.m; ++i) {
      const double c = dist.cdf(pe[i]);
      ks = std::max(ks, std::abs(c - static_cast<double>(i) / cfg.m));
      ks = std::max(ks, std::abs(c - static_cast<double>(i + 1) / cfg.m));
    }
    double mean_ex = 0.0;
    for (double x : ex) mean_ex += x;
    results[std::string("ks_") + name] = ks;
    results[std::string("mean_exact_") + name] = mean_ex / cfg.m;
    results[std::string("center_") + name] = dist.center();
  }

  json params = base_params(cfg);
  params["s"] = cfg.s;
  params["r"] = r;
  params["delta"] = cfg.delta;
  params["m"] = cfg.m;
  params["t"] = t;
  params["bins"] = cfg.bins;
  write_summary(dir, "dist", params, results,
                {"dist_hist.csv", "dist_analytic.csv"}, timer.seconds());
  return 0;
}

int run_fig5(const RunConfig& cfg) {
  Timer timer;
  set_max_threads(cfg.threads);
  const fs::path dir = prepare_out_dir(cfg);
  const int r = receiver_site(cfg);
  const CodeId code = cfg.code == "five" ? CodeId::kFive : CodeId::kFour;

  const ChainSpec base = ideal_xxx_spec(cfg.n, cfg.coupling);
  const SubspaceHamiltonian h(base);
  const double t = disorder_time(cfg, h, cfg.s, r);

  CsvFile csv(dir / "fig5.csv", "delta,f2min_avg,std_err,f_avg_re,f_avg_im,m");
  json rows = json::array();
  for (double delta : cfg.deltas) {
    DisorderModel model{delta, cfg.coupling, cfg.m, cfg.seed};
    const ExperimentRecord rec =
        disorder_averaged_qec(base, model, code, cfg.s, r, t);
    const Complex favg =
        disorder_averaged_amplitude(base, model, cfg.s, r, t);
    csv.row({csv_double(delta), csv_double(*rec.f2_min),
             csv_double(*rec.std_err), csv_double(favg.real()),
             csv_double(favg.imag()), std::to_string(cfg.m)});
    rows.push_back({{"delta", delta}, {"f2min_avg", *rec.f2_min}});
  }

  json params = base_params(cfg);
  params["s"] = cfg.s;
  params["r"] = r;
  params["m"] = cfg.m;
  params["t"] = t;
  params["code"] = cfg.code;
  params["deltas"] = cfg.deltas;
  write_summary(dir, "fig5", params, json{{"rows", rows}}, {"fig5.csv"},
                timer.seconds());
  return 0;
}

int run_localization(const RunConfig& cfg) {
  Timer timer;
  set_max_threads(cfg.threads);
  const fs::path dir = prepare_out_dir(cfg);
  const int r = receiver_site(cfg);

  const ChainSpec base = ideal_xxx_spec(cfg.n, cfg.coupling);
  const SubspaceHamiltonian h(base);
  const double t = disorder_time(cfg, h, cfg.s, r);

  CsvFile csv(dir / "localization.csv", "delta,site,avg_prob");
  CsvFile fits(dir / "localization_fits.csv",
               "delta,slope,intercept,loc_length");
  json results = json::array();
  for (double delta : cfg.deltas) {
    DisorderModel model{delta, cfg.coupling, cfg.m, cfg.seed};
    const LocalizationProfile prof = localization_profile(base, model, t);
    for (int site = 1; site <= cfg.n; ++site) {
      csv.row({csv_double(delta), std::to_string(site),
               csv_double(prof.avg_prob[site - 1])});
    }
    if (prof.fit_ok) {
      fits.row({csv_double(delta), csv_double(prof.slope),
                csv_double(prof.intercept), csv_double(prof.loc_length)});
      results.push_back({{"delta", delta},
                         {"loc_length", prof.loc_length},
                         {"end_prob", prof.avg_prob[cfg.n - 1]}});
    } else {
      results.push_back({{"delta", delta}, {"fit", "absent"}});
    }
  }

  json params = base_params(cfg);
  params["m"] = cfg.m;
  params["t"] = t;
  params["deltas"] = cfg.deltas;
  write_summary(dir, "localization", params, json{{"fits", results}},
                {"localization.csv", "localization_fits.csv"},
                timer.seconds());
  return 0;
}

}  // namespace spinqec
