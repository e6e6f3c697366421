// downcite: command-line front end for the download/citation dynamics
// toolkit. Subcommands mirror the analysis stages; every run is a pure
// function of its input files and flags.

#include <cctype>
#include <filesystem>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "downcite/downcite.hpp"

namespace fs = std::filesystem;
using namespace downcite;

namespace {

struct CommonOpts {
    std::string downloads;
    std::string citations;
    std::string out_dir = ".";
    std::string access = "ALL";
};

AccessFilter parse_filter(const std::string& token) {
    if (token == "ALL") return AccessFilter::All;
    if (token == "OA") return AccessFilter::OpenAccessOnly;
    if (token == "NON_OA") return AccessFilter::NonOpenAccessOnly;
    throw InputError("unknown access filter '" + token + "'");
}

void add_common(CLI::App* sub, CommonOpts& opts, bool needs_downloads) {
    auto* d = sub->add_option("--downloads", opts.downloads, "monthly downloads CSV");
    if (needs_downloads) d->required();
    sub->add_option("--citations", opts.citations, "annual citations CSV");
    sub->add_option("--out", opts.out_dir, "output directory")->capture_default_str();
    sub->add_option("--access", opts.access, "restrict to one access class")
        ->check(CLI::IsMember({"ALL", "OA", "NON_OA"}))
        ->capture_default_str();
}

fs::path ensure_out_dir(const CommonOpts& opts) {
    const fs::path dir(opts.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw InputError("cannot create output directory '" + opts.out_dir + "'");
    return dir;
}

Corpus load_corpus(const CommonOpts& opts, bool want_citations) {
    Corpus corpus = load_downloads(fs::path(opts.downloads));
    if (want_citations) {
        if (opts.citations.empty()) throw InputError("this subcommand needs --citations");
        load_citations(fs::path(opts.citations), corpus);
    } else if (!opts.citations.empty()) {
        load_citations(fs::path(opts.citations), corpus);
    }
    return filter_corpus(corpus, parse_filter(opts.access));
}

struct WindowOpts {
    std::string start;
    std::string end;
};

void add_window(CLI::App* sub, WindowOpts& opts) {
    sub->add_option("--window-start", opts.start, "analysis window start (YYYY-MM)");
    sub->add_option("--window-end", opts.end, "analysis window end (YYYY-MM)");
}

MonthWindow resolve_window(const Corpus& corpus, const WindowOpts& opts) {
    MonthWindow window = full_window(corpus);
    if (!opts.start.empty()) window.first = parse_year_month(opts.start);
    if (!opts.end.empty()) window.last = parse_year_month(opts.end);
    return window;
}

std::string lower_token(AccessClass access) {
    std::string token = access_token(access);
    for (char& c : token) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return token;
}

// --- classify flags -------------------------------------------------------

struct ClassifyOpts {
    ClassifyConfig config;
    double rmsd_both = 0;
    CLI::Option* rmsd_both_opt = nullptr;
    std::string halflife_mode = "lifetime";
};

void add_classify_flags(CLI::App* sub, ClassifyOpts& opts) {
    opts.rmsd_both_opt =
        sub->add_option("--rmsd-critical", opts.rmsd_both, "critical RMSD for both access classes");
    sub->add_option("--rmsd-critical-non-oa", opts.config.rmsd_critical_non_oa,
                    "critical RMSD, non-OA cohort")
        ->capture_default_str();
    sub->add_option("--rmsd-critical-oa", opts.config.rmsd_critical_oa, "critical RMSD, OA cohort")
        ->capture_default_str();
    sub->add_option("--burst-ratio", opts.config.burst_ratio_threshold,
                    "burstiness threshold on delta/<delta>")
        ->capture_default_str();
    sub->add_option("--sb-month", opts.config.sleeping_beauty_min_month,
                    "bursts after this month are sleeping beauties")
        ->capture_default_str();
    sub->add_option("--halflife-low", opts.config.halflife_low_fraction,
                    "flash-in-the-pan bound (fraction or percentile)")
        ->capture_default_str();
    sub->add_option("--halflife-high", opts.config.halflife_high_fraction,
                    "delayed bound (fraction or percentile)")
        ->capture_default_str();
    sub->add_option("--halflife-mode", opts.halflife_mode,
                    "ageing bounds from own lifetime or cohort half-life percentiles")
        ->check(CLI::IsMember({"lifetime", "cohort"}))
        ->capture_default_str();
}

ClassifyConfig resolve_classify(const ClassifyOpts& opts) {
    ClassifyConfig config = opts.config;
    if (opts.rmsd_both_opt && opts.rmsd_both_opt->count() > 0) {
        config.rmsd_critical_non_oa = opts.rmsd_both;
        config.rmsd_critical_oa = opts.rmsd_both;
    }
    config.halflife_mode = opts.halflife_mode == "cohort" ? HalfLifeMode::CohortPercentile
                                                          : HalfLifeMode::LifetimeFraction;
    config.validate();
    return config;
}

// --- fit flags --------------------------------------------------------------

struct FitOpts {
    FitConfig config;
    double horizon = 0; // 0: use the window length
};

void add_fit_flags(CLI::App* sub, FitOpts& opts) {
    sub->add_option("--max-iterations", opts.config.max_iterations, "solver iteration cap")
        ->capture_default_str();
    sub->add_option("--tol", opts.config.convergence_tol, "relative residual-drop tolerance")
        ->capture_default_str();
    sub->add_option("--horizon", opts.horizon,
                    "half-share horizon in months (default: window length)");
}

/// Fits every access class present under the filter. Returns one summary
/// per fitted class plus its residual table.
std::vector<std::pair<FitSummary, FitReport>> run_fits(const Corpus& corpus, MonthWindow window,
                                                       const FitOpts& opts, AccessFilter filter) {
    std::vector<std::pair<FitSummary, FitReport>> out;
    const double horizon =
        opts.horizon > 0 ? opts.horizon : static_cast<double>(window_length(window));
    for (const auto [access, class_filter] :
         {std::pair{AccessClass::NonOpenAccess, AccessFilter::NonOpenAccessOnly},
          std::pair{AccessClass::OpenAccess, AccessFilter::OpenAccessOnly}}) {
        if (!matches(filter, access)) continue;
        bool any = false;
        for (const auto& p : corpus.papers) any = any || p.access == access;
        if (!any) {
            if (filter != AccessFilter::All)
                throw InputError(std::string("no papers in access class ") + access_token(access));
            continue;
        }
        const DensitySeries density = density_series(corpus, window, class_filter);
        const DecayModelParams params = fit(density, opts.config);
        FitSummary summary;
        summary.access = access;
        summary.params = params;
        summary.horizon_months = horizon;
        summary.half_window = half_share_age(params, horizon);
        summary.half_unbounded = half_share_age(params, std::numeric_limits<double>::infinity());
        out.emplace_back(summary, model_report(params, density));
    }
    return out;
}

// --- correlate flags --------------------------------------------------------

struct CorrelateOpts {
    CorrelateConfig config;
    bool raw_angles = false;
};

void add_correlate_flags(CLI::App* sub, CorrelateOpts& opts) {
    sub->add_option("--delta-slow", opts.config.zigzag.delta_slow,
                    "zig-zag spread at or below: slow cluster (degrees)")
        ->capture_default_str();
    sub->add_option("--delta-high", opts.config.zigzag.delta_high,
                    "zig-zag spread above: high cluster (degrees)")
        ->capture_default_str();
    sub->add_flag("--raw-angles", opts.raw_angles,
                  "angles from raw increments instead of final-normalized ones");
    sub->add_option("--citation-shift", opts.config.citation_shift,
                    "count citations this many years past the window end")
        ->capture_default_str();
}

CorrelateConfig resolve_correlate(const CorrelateOpts& opts, AccessFilter filter) {
    CorrelateConfig config = opts.config;
    config.zigzag.normalize = !opts.raw_angles;
    config.filter = filter;
    config.validate();
    return config;
}

// --- subcommand bodies -------------------------------------------------------

void cmd_profile(const CommonOpts& common, const WindowOpts& window_opts) {
    const Corpus corpus = load_corpus(common, false);
    const AccessFilter filter = parse_filter(common.access);
    const fs::path dir = ensure_out_dir(common);

    const auto curves = cumulative_curves(corpus, AccessFilter::All); // corpus pre-filtered
    auto profile = cohort_profile(curves, filter);
    const MonthWindow window = resolve_window(corpus, window_opts);
    const auto sync = synchronous_distribution(corpus, window);

    { auto out = open_output((dir / "curves.csv").string()); write_curves_csv(out, curves); }
    {
        auto out = open_output((dir / "cohort_profile.csv").string());
        write_cohort_profile_csv(out, profile);
    }
    {
        auto out = open_output((dir / "synchronous.csv").string());
        write_synchronous_csv(out, sync);
    }
    std::cout << "profile: " << curves.size() << " papers, " << profile.age_span()
              << " profile ages, window " << to_string(window.first) << ".."
              << to_string(window.last) << " -> " << dir.string() << "\n";
}

void cmd_classify(const CommonOpts& common, const ClassifyOpts& classify_opts) {
    const Corpus corpus = load_corpus(common, false);
    const ClassifyConfig config = resolve_classify(classify_opts);
    const fs::path dir = ensure_out_dir(common);

    const ClassificationResult result = classify_corpus(corpus, config);
    { auto out = open_output((dir / "labels.csv").string()); write_labels_csv(out, result.labels); }
    {
        auto out = open_output((dir / "classify_summary.csv").string());
        write_classify_summary_csv(out, result);
    }
    {
        auto out = open_output((dir / "exclusions.csv").string());
        write_exclusions_csv(out, result.exclusions);
    }
    std::cout << "classify: " << result.labels.size() << " papers labeled, "
              << result.exclusions.size() << " exclusion entries -> " << dir.string() << "\n";
}

void cmd_fit(const CommonOpts& common, const WindowOpts& window_opts, const FitOpts& fit_opts) {
    const Corpus corpus = load_corpus(common, false);
    const AccessFilter filter = parse_filter(common.access);
    const MonthWindow window = resolve_window(corpus, window_opts);
    const fs::path dir = ensure_out_dir(common);

    const auto fits = run_fits(corpus, window, fit_opts, filter);
    std::vector<FitSummary> summaries;
    for (const auto& [summary, report] : fits) {
        summaries.push_back(summary);
        auto out = open_output(
            (dir / ("fit_report_" + lower_token(summary.access) + ".csv")).string());
        write_fit_report_csv(out, report);
    }
    write_json_file((dir / "fit_params.json").string(), fit_params_json(summaries));

    std::cout << "fit:";
    for (const auto& [summary, report] : fits)
        std::cout << ' ' << access_token(summary.access) << " converged="
                  << (summary.params.converged ? "yes" : "no")
                  << " iterations=" << summary.params.iterations;
    std::cout << " -> " << dir.string() << "\n";
}

void cmd_correlate(const CommonOpts& common, const CorrelateOpts& correlate_opts) {
    const Corpus corpus = load_corpus(common, true);
    const CorrelateConfig config =
        resolve_correlate(correlate_opts, AccessFilter::All); // corpus pre-filtered
    const fs::path dir = ensure_out_dir(common);

    const CorrelationReport report = cluster_report(corpus, config);
    write_json_file((dir / "correlation.json").string(), correlation_json(report));
    {
        auto out = open_output((dir / "cluster_membership.csv").string());
        write_membership_csv(out, report.memberships);
    }

    std::cout << "correlate: " << report.eligible_trajectories << " trajectories";
    for (const auto& [cluster, stat] : report.by_cluster)
        std::cout << ", " << cluster_token(cluster) << "=" << stat.n;
    std::cout << " -> " << dir.string() << "\n";
}

struct SynthOpts {
    SynthSpec spec{.paper_count = 100, .months = 78};
    std::string scenario = "decay";
    std::string start = "2007-01";
    ClusterScenarioSpec clusters;
};

void add_synth_flags(CLI::App* sub, SynthOpts& opts) {
    sub->add_option("--papers", opts.spec.paper_count, "papers to generate")
        ->capture_default_str();
    sub->add_option("--months", opts.spec.months, "window length in months")
        ->capture_default_str();
    sub->add_option("--seed", opts.spec.seed, "random seed")->capture_default_str();
    sub->add_option("--oa-fraction", opts.spec.oa_fraction, "share of OA papers")
        ->capture_default_str();
    sub->add_option("--noise", opts.spec.noise_spread, "log-normal noise spread")
        ->capture_default_str();
    sub->add_option("--rho0", opts.spec.non_oa_params.rho0, "non-OA initial density")
        ->capture_default_str();
    sub->add_option("--weight-a", opts.spec.non_oa_params.weight_a, "non-OA fast-factor weight")
        ->capture_default_str();
    sub->add_option("--decay-fast", opts.spec.non_oa_params.decay_fast, "non-OA fast rate")
        ->capture_default_str();
    sub->add_option("--decay-slow", opts.spec.non_oa_params.decay_slow, "non-OA slow rate")
        ->capture_default_str();
    sub->add_option("--oa-rho0", opts.spec.oa_params.rho0, "OA initial density")
        ->capture_default_str();
    sub->add_option("--oa-weight-a", opts.spec.oa_params.weight_a, "OA fast-factor weight")
        ->capture_default_str();
    sub->add_option("--oa-decay-fast", opts.spec.oa_params.decay_fast, "OA fast rate")
        ->capture_default_str();
    sub->add_option("--oa-decay-slow", opts.spec.oa_params.decay_slow, "OA slow rate")
        ->capture_default_str();
    sub->add_option("--burst-fraction", opts.spec.burst.fraction, "share of papers given a burst")
        ->capture_default_str();
    sub->add_option("--burst-amplitude", opts.spec.burst.amplitude,
                    "burst size, multiples of the median monthly level")
        ->capture_default_str();
    sub->add_option("--burst-month-min", opts.spec.burst.month_min, "earliest burst month")
        ->capture_default_str();
    sub->add_option("--burst-month-max", opts.spec.burst.month_max, "latest burst month")
        ->capture_default_str();
    sub->add_option("--coupling", opts.spec.citation_coupling,
                    "annual citations per download")
        ->capture_default_str();
    sub->add_option("--citation-noise", opts.spec.citation_noise_sd,
                    "sd of additive citation noise")
        ->capture_default_str();
    sub->add_option("--pub-spread", opts.spec.pub_spread_months,
                    "publication offsets drawn from [0, spread] months")
        ->capture_default_str();
    sub->add_option("--start", opts.start, "window start (YYYY-MM)")->capture_default_str();
    sub->add_option("--scenario", opts.scenario, "decay law corpus or fixed cluster fixture")
        ->check(CLI::IsMember({"decay", "clusters"}))
        ->capture_default_str();
    sub->add_option("--years", opts.clusters.years, "cluster fixture: annual points per paper")
        ->capture_default_str();
    sub->add_option("--papers-per-cluster", opts.clusters.papers_per_cluster,
                    "cluster fixture: papers per cluster")
        ->capture_default_str();
}

void cmd_synth(const CommonOpts& common, SynthOpts& opts) {
    opts.spec.start = parse_year_month(opts.start);
    opts.clusters.start_year = opts.spec.start.year;
    const SynthResult result = opts.scenario == "clusters"
                                   ? generate_cluster_scenario(opts.clusters)
                                   : generate(opts.spec);
    const fs::path dir = ensure_out_dir(common);
    {
        auto out = open_output((dir / "downloads.csv").string());
        write_downloads_csv(out, result.corpus);
    }
    {
        auto out = open_output((dir / "citations.csv").string());
        write_citations_csv(out, result.corpus);
    }
    write_json_file((dir / "ground_truth.json").string(), ground_truth_json(result.truth));
    std::cout << "synth: " << result.corpus.papers.size() << " papers, window ends "
              << to_string(result.corpus.observation_end) << ", seed " << opts.spec.seed << " -> "
              << dir.string() << "\n";
}

void cmd_report(const CommonOpts& common, const ClassifyOpts& classify_opts,
                const WindowOpts& window_opts, const FitOpts& fit_opts,
                const CorrelateOpts& correlate_opts) {
    const Corpus corpus = load_corpus(common, false);
    const fs::path dir = ensure_out_dir(common);

    const ClassificationResult classification =
        classify_corpus(corpus, resolve_classify(classify_opts));

    const MonthWindow window = resolve_window(corpus, window_opts);
    std::vector<FitSummary> fits;
    try {
        for (const auto& [summary, report] :
             run_fits(corpus, window, fit_opts, AccessFilter::All))
            fits.push_back(summary);
    } catch (const InputError&) {
        // too little density data: the section renders as "not computed"
    }

    std::optional<CorrelationReport> correlation;
    if (!common.citations.empty()) {
        try {
            correlation =
                cluster_report(corpus, resolve_correlate(correlate_opts, AccessFilter::All));
        } catch (const InputError&) {
            // no papers with citations: section renders as "not computed"
        }
    }

    const RunSummary summary = build_run_summary(
        corpus, &classification, fits, correlation ? &*correlation : nullptr);
    {
        auto out = open_output((dir / "summary.txt").string());
        out << render_summary_text(summary);
    }
    write_json_file((dir / "summary.json").string(), render_summary_json(summary));
    std::cout << "report: " << summary.papers << " papers summarized -> " << dir.string() << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"download and citation dynamics toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value config file; flags override it");

    CommonOpts profile_common, classify_common, fit_common, correlate_common, synth_common,
        report_common;
    WindowOpts profile_window, fit_window, report_window;
    ClassifyOpts classify_opts, report_classify;
    FitOpts fit_opts, report_fit;
    CorrelateOpts correlate_opts, report_correlate;
    SynthOpts synth_opts;
    std::string check_schema, check_file;

    auto* profile = app.add_subcommand("profile", "cumulative curves, cohort profile, age mix");
    add_common(profile, profile_common, true);
    add_window(profile, profile_window);
    profile->callback([&] { cmd_profile(profile_common, profile_window); });

    auto* classify = app.add_subcommand("classify", "label papers on the three axes");
    add_common(classify, classify_common, true);
    add_classify_flags(classify, classify_opts);
    classify->callback([&] { cmd_classify(classify_common, classify_opts); });

    auto* fit = app.add_subcommand("fit", "fit the two-factor decay law to download density");
    add_common(fit, fit_common, true);
    add_window(fit, fit_window);
    add_fit_flags(fit, fit_opts);
    fit->callback([&] { cmd_fit(fit_common, fit_window, fit_opts); });

    auto* correlate = app.add_subcommand("correlate", "downloads vs citations, zig-zag clusters");
    add_common(correlate, correlate_common, true);
    add_correlate_flags(correlate, correlate_opts);
    correlate->callback([&] { cmd_correlate(correlate_common, correlate_opts); });

    auto* synth = app.add_subcommand("synth", "generate a corpus with known ground truth");
    add_common(synth, synth_common, false);
    add_synth_flags(synth, synth_opts);
    synth->callback([&] { cmd_synth(synth_common, synth_opts); });

    auto* check = app.add_subcommand("schema-check", "validate a CSV against a named schema");
    check->add_option("schema", check_schema, "schema name")->required();
    check->add_option("file", check_file, "CSV file to validate")->required();
    check->callback([&] {
        const auto result = schema_check_file(check_file, check_schema);
        std::cout << "schema-check: " << result.schema_name << ": " << result.data_rows
                  << " rows ok (" << check_file << ")\n";
    });

    auto* report = app.add_subcommand("report", "run the pipeline and write the run summary");
    add_common(report, report_common, true);
    add_classify_flags(report, report_classify);
    add_window(report, report_window);
    add_fit_flags(report, report_fit);
    add_correlate_flags(report, report_correlate);
    report->callback([&] {
        cmd_report(report_common, report_classify, report_window, report_fit, report_correlate);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
