#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "hexwave/compress.hpp"
#include "hexwave/pr.hpp"

using namespace hexwave;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kVerifyFail = 1, kUsage = 2, kIo = 3 };

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// bank selection shared by several commands
struct BankArgs {
  std::string family = "hex";
  int p = 2;
  std::string kind = "basis-ob2";
  double eps = NAN;
  int p_smooth = 1;
  int grid_n = 192;
  std::string cut_target = "basis-ob2";
  int cut_band = 1;
  int stage = 1;

  void add(CLI::App* c, bool cut_opts) {
    c->add_option("--family", family, "partition family: hex")->check(CLI::IsMember({"hex"}))->capture_default_str();
    c->add_option("--p", p, "directional parameter (shannon only for p != 2)")->check(CLI::Range(1, 3))->capture_default_str();
    std::vector<std::string> kinds{"shannon", "basis-ob1", "basis-ob2", "frame"};
    if (cut_opts) kinds.push_back("cut");
    c->add_option("--kind", kind, "filter kind")->check(CLI::IsMember(kinds))->capture_default_str();
    c->add_option("--eps", eps, "smoothing width (default pi/16 basis, 0.40 frame)");
    c->add_option("--p-smooth", p_smooth, "ramp smoothness order")->check(CLI::Range(0, 3))->capture_default_str();
    c->add_option("--grid-n", grid_n, "frequency grid size per axis")->check(CLI::Range(12, 4096))->capture_default_str();
    if (cut_opts) {
      c->add_option("--cut-target", cut_target, "bank the cut refines")->check(CLI::IsMember({"basis-ob2", "frame"}))->capture_default_str();
      c->add_option("--cut-band", cut_band, "band to split")->check(CLI::Range(1, 6))->capture_default_str();
      c->add_option("--stage", stage, "cut stage")->capture_default_str();
    }
  }

  double eps_or_default() const {
    if (!std::isnan(eps)) return eps;
    return kind == "frame" ? kDefaultFrameEps : kDefaultBasisEps;
  }

  FilterBankSpec build() const {
    if (grid_n % 12) throw FilterError("--grid-n must be a multiple of 12");
    if (kind == "cut") return cutting_filters(kind_from_name(cut_target), stage, eps_or_default(), grid_n, cut_band);
    if (p != 2) {
      if (kind != "shannon") throw FilterError("smoothed and frame banks exist for --p 2 only");
      return shannon_filters(build_hexagonal(p), grid_n);
    }
    return make_bank(kind_from_name(kind), eps_or_default(), p_smooth, grid_n);
  }
};

void write_text(const std::string& path, const std::string& s) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path);
  os << s;
  if (!os) throw IoError("write failed: " + path);
}

template <class F>
auto io(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const std::invalid_argument&) {
    throw;
  } catch (const std::exception& e) {
    throw IoError(e.what());
  }
}

ImageGrid load_image(const std::string& path) {
  if (!fs::exists(path)) throw IoError("missing image file: " + path);
  return io([&] { return read_image(path); });
}

double rel_err(const ImageGrid& a, const ImageGrid& b) {
  if (a.n1 != b.n1 || a.n2 != b.n2) throw TransformError("reference has different dimensions");
  double e = 0, s = 0;
  for (std::size_t i = 0; i < a.v.size(); ++i) e += (a.v[i] - b.v[i]) * (a.v[i] - b.v[i]), s += b.v[i] * b.v[i];
  return s > 0 ? std::sqrt(e / s) : std::sqrt(e);
}

nlohmann::json report_json(const PRReport& r, bool timing) {
  auto j = to_json(r);
  if (!timing) j.erase("runtime_ms");
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hexwave: hexagonal-lattice directional wavelets"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "help for every subcommand");
  int threads = 0;
  app.add_option("--threads", threads, "worker cap (overrides HEXWAVE_THREADS)")->check(CLI::Range(1, 1024));

  // build-filters
  auto* bf = app.add_subcommand("build-filters", "construct a filter bank, write the container and heatmaps");
  BankArgs bfa;
  bfa.add(bf, true);
  std::string bf_out = "filters.hxfb", bf_maps;
  bool bf_no_maps = false;
  bf->add_option("-o,--out", bf_out, "container path")->capture_default_str();
  bf->add_option("--heatmaps", bf_maps, "heatmap prefix (default: container path without extension)");
  bf->add_flag("--no-heatmaps", bf_no_maps, "skip the PNG heatmaps");

  // check-pr
  auto* cp = app.add_subcommand("check-pr", "verify perfect reconstruction of a bank");
  BankArgs cpa;
  cpa.add(cp, true);
  std::string cp_bank, cp_json;
  int cp_probes = 500;
  bool cp_timing = false;
  cp->add_option("--bank", cp_bank, "filter container (instead of building one)");
  cp->add_option("--json", cp_json, "write the report as JSON");
  cp->add_option("--probes", cp_probes, "random probes for the matrix check")->check(CLI::Range(1, 100000))->capture_default_str();
  cp->add_flag("--timing", cp_timing, "include runtimes in the JSON report");

  // transform
  auto* tr = app.add_subcommand("transform", "analyze an image into a subband pyramid");
  BankArgs tra;
  tra.add(tr, false);
  std::string tr_in, tr_out = "pyramid.hxpy";
  int tr_levels = 3, tr_cut_level = 1;
  bool tr_cut = false;
  tr->add_option("-i,--input", tr_in, "PGM or PNG image")->required();
  tr->add_option("-o,--out", tr_out, "pyramid container")->capture_default_str();
  tr->add_option("--levels", tr_levels, "decomposition levels")->check(CLI::Range(1, 8))->capture_default_str();
  tr->add_flag("--cut", tr_cut, "split every wavelet band of one level in two (stage 1)");
  tr->add_option("--cut-level", tr_cut_level, "level the cut applies to")->capture_default_str();

  // itransform
  auto* it = app.add_subcommand("itransform", "synthesize an image from a pyramid");
  std::string it_in, it_out = "reconstructed.pgm", it_ref;
  it->add_option("-i,--input", it_in, "pyramid container")->required();
  it->add_option("-o,--out", it_out, "output PGM (rounded to 8 bits)")->capture_default_str();
  it->add_option("--reference", it_ref, "image to compare against; prints the relative L2 error");

  // compress
  auto* cm = app.add_subcommand("compress", "nonlinear approximation benchmark");
  std::string cm_cfg, cm_csv, cm_json, cm_out, cm_taps;
  std::vector<std::string> cm_images;
  std::string cm_methods;
  double cm_ratio = NAN;
  int cm_levels = 0, cm_tlevels = 0;
  bool cm_timing = false;
  cm->add_option("--config", cm_cfg, "key = value config file");
  cm->add_option("images", cm_images, "input images");
  cm->add_option("--methods", cm_methods, "comma separated subset of: tensor, hex-basis-ob1, hex-basis-ob2, hex-frame, hex-basis-cut, hex-frame-cut");
  cm->add_option("--ratio", cm_ratio, "compression ratio N/kept (default 20)")->check(CLI::Range(1.0, 1e9));
  cm->add_option("--levels", cm_levels, "hex levels (default 3)")->check(CLI::Range(1, 8));
  cm->add_option("--tensor-levels", cm_tlevels, "separable baseline levels (default 5)")->check(CLI::Range(1, 10));
  cm->add_option("--taps", cm_taps, "lowpass taps file for the baseline (default db6)");
  cm->add_option("--out-dir", cm_out, "write reconstructions here");
  cm->add_option("--csv", cm_csv, "write CSV here (default stdout)");
  cm->add_option("--json", cm_json, "also write JSON");
  cm->add_flag("--timing", cm_timing, "fill runtime_ms (output no longer reproducible)");

  // classify
  auto* cl = app.add_subcommand("classify", "boundary classification of a partition");
  std::string cl_family = "hex", cl_svg, cl_json;
  int cl_p = 2;
  cl->add_option("--family", cl_family, "hex, hex-frame or dyadic")->check(CLI::IsMember({"hex", "hex-frame", "dyadic"}))->capture_default_str();
  cl->add_option("--p", cl_p, "directional parameter")->check(CLI::Range(1, 4))->capture_default_str();
  cl->add_option("--svg", cl_svg, "write the partition drawing (singular edges red)");
  cl->add_option("--json", cl_json, "write the classification as JSON");

  // render
  auto* rd = app.add_subcommand("render", "spatial scaling function / wavelets and frequency panels");
  BankArgs rda;
  rda.add(rd, false);
  std::string rd_prefix = "render";
  int rd_levels = 4, rd_size = 128;
  rd->add_option("-o,--prefix", rd_prefix, "output prefix")->capture_default_str();
  rd->add_option("--levels", rd_levels, "product truncation depth")->check(CLI::Range(1, 8))->capture_default_str();
  rd->add_option("--size", rd_size, "spatial panel size")->check(CLI::Range(8, 2048))->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }
  if (threads > 0) setenv("HEXWAVE_THREADS", std::to_string(threads).c_str(), 1);

  try {
    if (*bf) {
      auto fb = bfa.build();
      io([&] { save_bank(fb, bf_out); });
      std::cout << "wrote " << bf_out << " (" << kind_name(fb.kind) << ", " << fb.size() << " bands, grid " << fb.grid_n << ")\n";
      if (!bf_no_maps) {
        std::string prefix = bf_maps.empty() ? (fs::path(bf_out).parent_path() / fs::path(bf_out).stem()).string() : bf_maps;
        for (auto& f : io([&] { return write_heatmaps(fb, prefix); })) std::cout << "wrote " << f << "\n";
      }
      return kOk;
    }
    if (*cp) {
      FilterBankSpec fb = cp_bank.empty() ? cpa.build() : io([&] { return load_bank(cp_bank); });
      auto rep = check_pr(fb);
      if (cp_probes != 500) {
        auto m = matrix_pr_residual(fb, cp_probes);
        rep.max_matrix_residual = m.max_matrix_residual;
        rep.probes = m.probes;
      }
      std::cout << to_table(rep);
      if (!cp_json.empty()) write_text(cp_json, report_json(rep, cp_timing).dump(2) + "\n");
      return rep.verdict() == Verdict::Fail ? kVerifyFail : kOk;
    }
    if (*tr) {
      auto x = load_image(tr_in);
      auto fb = std::make_shared<FilterBankSpec>(tra.build());
      if (fb->kind == BankKind::Shannon && tra.p != 2) throw TransformError("transform needs a p = 2 bank");
      if (check_pr(*fb).verdict() == Verdict::Fail) {
        std::cerr << "error: filter bank fails perfect reconstruction\n";
        return kVerifyFail;
      }
      auto p = analyze(x, fb, tr_levels);
      if (tr_cut) p = apply_cut(p, std::make_shared<CutPlan>(make_cut_plan(*fb, 1, tra.eps_or_default(), {1, 2, 3, 4, 5, 6}, tr_cut_level)));
      io([&] { save_pyramid(p, tr_out); });
      std::cout << "wrote " << tr_out << ": " << p.coefficient_count() << " coefficients for " << x.v.size() << " pixels\n";
      return kOk;
    }
    if (*it) {
      if (!fs::exists(it_in)) throw IoError("missing pyramid file: " + it_in);
      auto p = io([&] { return load_pyramid(it_in); });
      auto y = synthesize(p);
      io([&] { write_pgm(it_out, y); });
      std::cout << "wrote " << it_out << "\n";
      if (!it_ref.empty()) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.3e", rel_err(y, load_image(it_ref)));
        std::cout << "relative L2 error: " << buf << "\n";
      }
      return kOk;
    }
    if (*cm) {
      BenchConfig cfg = cm_cfg.empty() ? BenchConfig{} : io([&] { return load_bench_config(cm_cfg); });
      if (!cm_images.empty()) cfg.images = cm_images;
      if (!cm_methods.empty()) {
        cfg.methods.clear();
        std::stringstream ss(cm_methods);
        for (std::string m; std::getline(ss, m, ',');)
          if (!m.empty()) cfg.methods.push_back(m);
      }
      if (!std::isnan(cm_ratio)) cfg.ratio = cm_ratio;
      if (cm_levels) cfg.levels = cm_levels;
      if (cm_tlevels) cfg.tensor_levels = cm_tlevels;
      if (!cm_taps.empty()) cfg.taps = cm_taps;
      if (!cm_out.empty()) cfg.out_dir = cm_out;
      if (cm_timing) cfg.timing = true;
      if (cfg.images.empty()) throw CompressError("no images: pass them as arguments or via images = ... in the config");
      for (auto& im : cfg.images)
        if (!fs::exists(im)) throw IoError("missing image file: " + im);
      if (!cfg.taps.empty() && !fs::exists(cfg.taps)) throw IoError("missing taps file: " + cfg.taps);
      auto rows = run_benchmark(cfg);
      auto csv = to_csv(rows);
      if (cm_csv.empty())
        std::cout << csv;
      else
        write_text(cm_csv, csv);
      if (!cm_json.empty()) {
        nlohmann::json j;
        j["config"] = {{"ratio", cfg.ratio}, {"levels", cfg.levels}, {"tensor_levels", cfg.tensor_levels}, {"eps", cfg.eps},
                       {"frame_eps", cfg.frame_eps}, {"p_smooth", cfg.p_smooth}, {"cut_level", cfg.cut_level},
                       {"taps", cfg.taps.empty() ? "db6" : cfg.taps}};
        for (auto& r : rows)
          j["results"].push_back({{"image", r.image}, {"method", r.method}, {"ratio", r.ratio}, {"kept", r.kept},
                                  {"psnr_db", r.psnr_db}, {"runtime_ms", r.runtime_ms}});
        write_text(cm_json, j.dump(2) + "\n");
      }
      return kOk;
    }
    if (*cl) {
      FrequencyPartition part = cl_family == "hex" ? build_hexagonal(cl_p)
                                : cl_family == "dyadic" ? build_dyadic(cl_p)
                                                        : build_hexagonal_frame();
      auto bc = classify_boundaries(part);
      auto tr3 = regular_triples(bc);
      for (int k = 0; k < part.size(); ++k) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "A%-2d boundary %.4f  singular %.4f  regular %.4f\n", k, bc.boundary[k].length(part.cell),
                      bc.singular[k].length(part.cell), bc.regular[k].length(part.cell));
        std::cout << buf;
      }
      std::cout << tr3.size() << " regular triples\n";
      for (auto& t : tr3)
        std::cout << "  (" << t.k1 << ", " << t.k2 << ", gamma = (" << t.gamma[0] << ", " << t.gamma[1] << "))\n";
      if (!cl_svg.empty()) write_text(cl_svg, to_svg(part, &bc));
      if (!cl_json.empty()) write_text(cl_json, to_json(bc, part).dump(2) + "\n");
      return kOk;
    }
    if (*rd) {
      auto fb = rda.build();
      auto panels = render_basis_functions(fb, rd_levels, rd_size);
      for (std::size_t k = 0; k < panels.size(); ++k) {
        std::string f = rd_prefix + (k == 0 ? "_phi.png" : "_psi" + std::to_string(k) + ".png");
        io([&] { write_png_gray(f, panels[k], rd_size, rd_size, true); });
        std::cout << "wrote " << f << "\n";
      }
      for (auto& f : io([&] { return write_heatmaps(fb, rd_prefix); })) std::cout << "wrote " << f << "\n";
      return kOk;
    }
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const LatticeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  }
  return kUsage;
}
