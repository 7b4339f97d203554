#include "parnms/commands.hpp"

#include <fstream>
#include <ostream>

#include "parnms/oracles.hpp"

namespace pnms {

namespace {

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const InternalError& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
}

void emit_csv(std::span<const BenchRecord> records, const std::filesystem::path& path, std::ostream& out) {
  if (path.empty()) {
    out << to_csv(records);
  } else {
    write_bench_csv(records, path);
  }
}

NmsConfig config_for(double theta, std::size_t d_max, std::size_t k, std::size_t workers, TieBreak tie) {
  NmsConfig cfg;
  cfg.theta = theta;
  cfg.d_max = d_max;
  cfg.k = k;
  cfg.workers = workers;
  cfg.tie_break = tie;
  cfg.validate();
  return cfg;
}

void require_nonempty(const std::vector<std::size_t>& values, const char* what) {
  if (values.empty()) throw ConfigError(std::string("no ") + what + " given");
  for (auto v : values) {
    if (v == 0) throw ConfigError(std::string(what) + " must be positive");
  }
}

}  // namespace

int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    opts.config.validate();
    const Format in_fmt = opts.input_format.value_or(format_from_path(opts.input));
    const DetectionVector d = load_detections(opts.input, in_fmt, opts.config.d_max);
    NmsEngine engine(opts.config);
    NmsResult result;
    const BenchRecord rec = measure(engine, d, {1, 0}, opts.seed, &result);
    if (!opts.output.empty()) {
      store_result(result, opts.output, opts.output_format.value_or(format_from_path(opts.output)));
    }
    out << to_csv_row(rec) << '\n';
    return kExitOk;
  });
}

int cmd_gen(const GenOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const DetectionVector d = generate_frame(opts.spec, opts.d_max);
    if (opts.output.empty()) {
      out << format_detections(d.valid(), opts.output_format.value_or(Format::csv));
    } else {
      store_detections(d.valid(), opts.output, opts.output_format.value_or(format_from_path(opts.output)));
      err << "wrote " << d.count() << " detections (seed " << opts.spec.seed << ") to " << opts.output.string()
          << '\n';
    }
    return kExitOk;
  });
}

int cmd_sweep_n(const SweepNOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    require_nonempty(opts.n_values, "n values");
    require_nonempty(opts.workers, "worker counts");
    std::vector<BenchRecord> records;
    for (std::size_t workers : opts.workers) {
      for (std::size_t n : opts.n_values) {
        const std::size_t d_max = opts.fixed_dmax.value_or(round_up_to_multiple(n, opts.k));
        if (n > d_max) throw ConfigError("n=" + std::to_string(n) + " exceeds d_max=" + std::to_string(d_max));
        NmsEngine engine(config_for(opts.theta, d_max, opts.k, workers, opts.tie_break));
        const DetectionVector d = workload_for_n(opts.spec, n, d_max);
        records.push_back(measure(engine, d, opts.timing, opts.spec.seed));
      }
    }
    emit_csv(records, opts.output_csv, out);
    return kExitOk;
  });
}

int cmd_sweep_k(const SweepKOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    require_nonempty(opts.k_values, "k values");
    require_nonempty(opts.workers, "worker counts");
    for (std::size_t k : opts.k_values) (void)config_for(opts.theta, opts.d_max, k, 1, opts.tie_break);
    const DetectionVector d = workload_for_n(opts.spec, opts.n, opts.d_max);

    std::vector<BenchRecord> records;
    std::optional<NmsResult> reference;
    for (std::size_t workers : opts.workers) {
      for (std::size_t k : opts.k_values) {
        NmsEngine engine(config_for(opts.theta, opts.d_max, k, workers, opts.tie_break));
        NmsResult result;
        records.push_back(measure(engine, d, opts.timing, opts.spec.seed, &result));
        if (!reference) {
          reference = std::move(result);
        } else if (result != *reference) {
          throw InternalError("survivors changed with k=" + std::to_string(k) + ", workers=" +
                              std::to_string(workers));
        }
      }
    }
    emit_csv(records, opts.output_csv, out);
    return kExitOk;
  });
}

int cmd_sweep_workers(const SweepWorkersOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    require_nonempty(opts.workers, "worker counts");
    const std::size_t d_max = opts.d_max.value_or(round_up_to_multiple(opts.n, opts.k));
    const DetectionVector d = workload_for_n(opts.spec, opts.n, d_max);
    std::vector<BenchRecord> records;
    std::optional<NmsResult> reference;
    for (std::size_t workers : opts.workers) {
      NmsEngine engine(config_for(opts.theta, d_max, opts.k, workers, opts.tie_break));
      NmsResult result;
      records.push_back(measure(engine, d, opts.timing, opts.spec.seed, &result));
      if (!reference) {
        reference = std::move(result);
      } else if (result != *reference) {
        throw InternalError("survivors changed with workers=" + std::to_string(workers));
      }
    }
    emit_csv(records, opts.output_csv, out);
    return kExitOk;
  });
}

int cmd_compare(const CompareOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    std::vector<DetectionVector> instances;
    if (!opts.inputs.empty()) {
      for (const auto& path : opts.inputs) {
        instances.push_back(load_detections(path, format_from_path(path), opts.d_max));
      }
    } else {
      if (opts.instances == 0) throw ConfigError("instances must be positive");
      for (std::size_t t = 0; t < opts.instances; ++t) {
        WorkloadSpec spec = opts.spec;
        spec.seed = opts.spec.seed + t;
        instances.push_back(generate_frame(spec));
      }
    }
    const AgreementReport r = compare_methods(instances, opts.theta, opts.workers);
    out << "instances=" << r.instances << " exact_matches=" << r.exact_matches
        << " jaccard_mean=" << r.jaccard_mean << " max_symmetric_diff=" << r.max_symmetric_diff << '\n';
    return kExitOk;
  });
}

int cmd_plot(const PlotOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto records = read_bench_csv(opts.input_csv);
    const std::string svg = render_bench_chart(records, opts.kind);
    if (opts.output_svg.empty()) {
      out << svg;
    } else {
      std::ofstream f(opts.output_svg, std::ios::binary | std::ios::trunc);
      if (!f) throw IoError("cannot open '" + opts.output_svg.string() + "' for writing");
      f << svg;
      if (!f.flush()) throw IoError("write to '" + opts.output_svg.string() + "' failed");
    }
    return kExitOk;
  });
}

}  // namespace pnms
