#include "cli.hpp"

#include "intdim/dataset.hpp"
#include "intdim/error.hpp"
#include "intdim/estimators.hpp"
#include "intdim/knn.hpp"
#include "intdim/parallel.hpp"
#include "intdim/report.hpp"
#include "intdim/stats.hpp"
#include "intdim/synth.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

namespace intdim::cli {
namespace {

using Json = nlohmann::ordered_json;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string command;

    // dataset
    std::string dataset;
    bool no_scale = false;
    bool csv_labels = false;
    std::string resize;
    std::string classes;
    std::size_t subsample = 0;
    bool no_dedup = false;

    // estimator
    std::string estimator = "mle";
    std::string k_list;
    std::string aggregation = "mackay";
    std::string normalization = "k-1";
    double alpha = 1.0;
    double discard = 0.1;
    std::size_t k1 = 20, k2 = 55, bootstraps = 20, degree = 1;
    std::size_t bins = 1000, sample_cap = 10000;
    std::size_t replicates = 1;
    std::uint64_t seed = 0;
    std::string knn_cache;

    // output
    std::string report;
    std::string csv;
    std::string format = "table";
    std::string out;
    bool f64 = false;

    // generate / noise / convergence
    std::string kind = "hypercube";
    std::size_t d = 0, ambient = 0, n = 0;
    std::size_t d_noise = 0;
    std::string mode = "replace-pixels";
    std::string sizes;

    int threads = 0;
};

// ---------------------------------------------------------------------------
// Config file: key=value lines mirroring the long flag names. A `command` key
// selects the subcommand when none is given; flags on the command line win.
// ---------------------------------------------------------------------------

std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    std::optional<std::string> path;
    std::vector<std::string> rest;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size())
                throw ConfigError("--config needs a file argument");
            path = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
        } else {
            rest.push_back(args[i]);
        }
    }
    if (!path)
        return rest;

    std::ifstream in(*path);
    if (!in)
        throw ConfigError("cannot open config file " + *path);
    std::optional<std::string> command;
    std::vector<std::string> from_file;
    std::string line;
    for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#')
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(*path + ":" + std::to_string(lineno) + ": expected key=value");
        auto key = line.substr(first, eq - first);
        auto value = line.substr(eq + 1);
        while (!key.empty() && (key.back() == ' ' || key.back() == '\t'))
            key.pop_back();
        const auto vstart = value.find_first_not_of(" \t");
        value = vstart == std::string::npos ? std::string() : value.substr(vstart);
        while (!value.empty() && (value.back() == ' ' || value.back() == '\t' || value.back() == '\r'))
            value.pop_back();
        if (key == "command")
            command = value;
        else
            from_file.push_back("--" + key + "=" + value);
    }

    // Subcommand first, then file options, then the command line.
    static const std::set<std::string> kCommands{"estimate", "generate", "noise", "convergence", "compare", "knn-cache"};
    const auto sub = std::find_if(rest.begin(), rest.end(), [](const std::string& a) { return kCommands.count(a) > 0; });
    std::vector<std::string> out, after;
    if (sub != rest.end()) {
        out.assign(rest.begin(), sub + 1);
        after.assign(sub + 1, rest.end());
    } else {
        if (!command)
            throw ConfigError("no command given on the command line or in " + *path);
        out.push_back(*command);
        after = rest;
    }
    out.insert(out.end(), from_file.begin(), from_file.end());
    out.insert(out.end(), after.begin(), after.end());
    return out;
}

// ---------------------------------------------------------------------------
// Option parsing helpers
// ---------------------------------------------------------------------------

std::vector<std::size_t> parse_counts(const std::string& text, const char* what) {
    std::vector<std::size_t> out;
    std::string_view rest = text;
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        auto field = rest.substr(0, comma);
        std::size_t v = 0;
        const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
        if (ec != std::errc{} || ptr != field.data() + field.size())
            throw ConfigError(std::string("cannot parse ") + what + " '" + text + "'");
        out.push_back(v);
        if (comma == std::string_view::npos)
            break;
        rest.remove_prefix(comma + 1);
    }
    if (out.empty())
        throw ConfigError(std::string("empty ") + what);
    return out;
}

ImageShape parse_shape(const std::string& text) {
    ImageShape s;
    if (std::sscanf(text.c_str(), "%zux%zux%zu", &s.height, &s.width, &s.channels) != 3 || s.size() == 0)
        throw ConfigError("resize target must look like 32x32x3, got '" + text + "'");
    return s;
}

DatasetSource make_source(const RunConfig& cfg) {
    if (cfg.dataset.empty())
        throw ConfigError("--dataset is required");
    DatasetSource src;
    try {
        src = parse_source(cfg.dataset);
    } catch (const DatasetError& e) {
        throw ConfigError(e.what());
    }
    src.scale = !cfg.no_scale;
    src.csv_label_column = cfg.csv_labels;
    if (!cfg.resize.empty())
        src.resize = parse_shape(cfg.resize);
    return src;
}

EstimatorSpec make_spec(const RunConfig& cfg, const std::string& estimator) {
    EstimatorSpec spec;
    try {
        spec = default_spec(parse_estimator(estimator));
        spec.aggregation = parse_aggregation(cfg.aggregation);
        spec.normalization = parse_normalization(cfg.normalization);
    } catch (const EstimatorError& e) {
        throw ConfigError(e.what());
    }
    if (!(cfg.alpha > 0.0 && cfg.alpha <= 1.0))
        throw ConfigError("--alpha must lie in (0, 1]");
    spec.anchor_fraction = cfg.alpha;
    spec.discard_fraction = cfg.discard;
    spec.geomle = {cfg.k1, cfg.k2, cfg.bootstraps, cfg.degree, cfg.seed};
    spec.bins = cfg.bins;
    spec.sample_cap = cfg.sample_cap;
    spec.seed = cfg.seed;
    spec.deduplicate = !cfg.no_dedup;
    return spec;
}

std::vector<std::size_t> k_values(const RunConfig& cfg, const EstimatorSpec& spec) {
    if (cfg.k_list.empty())
        return {spec.k};
    return parse_counts(cfg.k_list, "k list");
}

std::string dataset_label(const RunConfig& cfg) {
    const auto colon = cfg.dataset.find(':');
    std::filesystem::path p = colon == std::string::npos ? cfg.dataset : cfg.dataset.substr(colon + 1);
    auto name = p.filename().string();
    if (name.empty())
        name = p.parent_path().filename().string();
    return name.empty() ? cfg.dataset : name;
}

std::string fixed1(double v) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(1) << v;
    return s.str();
}

std::string cell(const EstimateReport& r) {
    if (r.spec.kind != EstimatorKind::GeoMle && r.per_replicate.size() > 1)
        return fixed1(r.estimate) + " (" + fixed1(r.std_error) + ")";
    return fixed1(r.estimate);
}

Json config_echo(const RunConfig& c) {
    Json j;
    j["command"] = c.command;
    if (!c.dataset.empty()) {
        j["dataset"] = c.dataset;
        j["scale"] = !c.no_scale;
        j["csv_labels"] = c.csv_labels;
        j["resize"] = c.resize;
        j["classes"] = c.classes;
        j["subsample"] = c.subsample;
        j["deduplicate"] = !c.no_dedup;
    }
    if (c.command == "estimate" || c.command == "convergence" || c.command == "compare" || c.command == "knn-cache") {
        j["estimator"] = c.estimator;
        j["k"] = c.k_list;
        j["aggregation"] = c.aggregation;
        j["normalization"] = c.normalization;
        j["alpha"] = c.alpha;
        j["discard"] = c.discard;
        j["k1"] = c.k1;
        j["k2"] = c.k2;
        j["bootstraps"] = c.bootstraps;
        j["degree"] = c.degree;
        j["bins"] = c.bins;
        j["sample_cap"] = c.sample_cap;
        j["replicates"] = c.replicates;
        j["knn_cache"] = c.knn_cache;
    }
    if (c.command == "generate") {
        j["kind"] = c.kind;
        j["d"] = c.d;
        j["N"] = c.ambient;
        j["n"] = c.n;
    }
    if (c.command == "noise") {
        j["d_noise"] = c.d_noise;
        j["mode"] = c.mode;
    }
    if (c.command == "convergence")
        j["sizes"] = c.sizes;
    j["seed"] = c.seed;
    return j;
}

Json envelope(const RunConfig& cfg) {
    Json j;
    j["tool"] = kToolName;
    j["version"] = kToolVersion;
    j["command"] = cfg.command;
    j["config"] = config_echo(cfg);
    j["seed"] = cfg.seed;
    return j;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::trunc);
    if (!f)
        throw ConfigError("cannot write " + path);
    f << text;
}

void emit(const RunConfig& cfg, const Json& report, const std::string& table, const std::string& csv,
          std::ostream& out) {
    if (!cfg.report.empty())
        write_text(cfg.report, report.dump(2) + "\n");
    if (!cfg.csv.empty())
        write_text(cfg.csv, csv);
    if (cfg.format == "json")
        out << report.dump(2) << "\n";
    else
        out << table;
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

struct Loaded {
    PointSet points;
    std::size_t dedup_removed = 0;
};

// Load, filter by class, deduplicate. Subsampling is left to the caller since
// replicated runs draw their own subsamples.
Loaded load_dataset(const RunConfig& cfg) {
    PointSet ps = load(make_source(cfg));
    if (!cfg.classes.empty()) {
        std::set<Label> classes;
        for (auto c : parse_counts(cfg.classes, "class list"))
            classes.insert(static_cast<Label>(c));
        ps = filter_classes(ps, classes);
    }
    if (cfg.no_dedup)
        return {std::move(ps), 0};
    auto dd = deduplicate(ps);
    return {std::move(dd.points), dd.removed};
}

Json dataset_json(const RunConfig& cfg, const PointSet& ps, std::size_t removed) {
    Json j;
    j["source"] = cfg.dataset;
    j["name"] = ps.name();
    j["n"] = ps.size();
    j["N"] = ps.dim();
    j["dedup_removed"] = removed;
    return j;
}

void stamp(EstimateReport& r, const RunConfig& cfg, std::size_t removed) {
    r.dedup_removed += removed;
    r.spec.deduplicate = !cfg.no_dedup;
}

const NeighborTable* try_cache(const RunConfig& cfg, const PointSet& ps, std::optional<NeighborTable>& slot,
                               std::ostream& err) {
    if (cfg.knn_cache.empty() || !std::filesystem::exists(raw_header_path(cfg.knn_cache)))
        return nullptr;
    try {
        slot = load_neighbor_table(cfg.knn_cache, ps);
        return &*slot;
    } catch (const KnnError& e) {
        err << "warning: ignoring neighbor cache: " << e.what() << "\n";
        return nullptr;
    }
}

int cmd_estimate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    auto spec = make_spec(cfg, cfg.estimator);
    const auto ks = k_values(cfg, spec);
    if (cfg.replicates == 0)
        throw ConfigError("--replicates must be at least 1");
    auto [ps, removed] = load_dataset(cfg);
    spec.deduplicate = false; // done above, once

    std::vector<EstimateReport> reports;
    std::size_t n_used = ps.size();
    if (cfg.replicates > 1) {
        for (auto k : ks) {
            auto s = spec;
            s.k = k;
            reports.push_back(replicate_estimate(ps, s, cfg.replicates, cfg.seed, cfg.subsample));
        }
        if (cfg.subsample > 0)
            n_used = cfg.subsample;
    } else {
        std::optional<PointSet> sub;
        const PointSet* w = &ps;
        if (cfg.subsample > 0 && cfg.subsample < ps.size()) {
            sub = subsample(ps, cfg.subsample, cfg.seed);
            w = &*sub;
            n_used = sub->size();
        }
        std::optional<NeighborTable> slot;
        const NeighborTable* cache = try_cache(cfg, *w, slot, err);
        reports = estimate_k_sweep(*w, spec, ks, cache);
    }
    for (auto& r : reports)
        stamp(r, cfg, removed);

    Json j = envelope(cfg);
    j["dataset"] = dataset_json(cfg, ps, removed);
    j["dataset"]["n_used"] = n_used;
    j["alpha"] = cfg.alpha;
    j["results"] = Json::array();
    for (const auto& r : reports)
        j["results"].push_back(report_to_json(r));

    const std::string name = to_string(spec.kind) == "mle" ? "MLE" : std::string(to_string(spec.kind));
    std::ostringstream table, csv;
    table << std::left << std::setw(16) << "dataset";
    csv << "dataset";
    for (const auto& r : reports) {
        const std::string head = name + " (k=" + std::to_string(r.spec.k) + ")";
        table << std::setw(16) << head;
        csv << ',' << head;
    }
    table << "\n" << std::setw(16) << dataset_label(cfg);
    csv << "\n" << dataset_label(cfg);
    for (const auto& r : reports) {
        table << std::setw(16) << cell(r);
        csv << ',' << std::setprecision(17) << r.estimate;
    }
    table << "\n";
    csv << "\n";
    emit(cfg, j, table.str(), csv.str(), out);
    return kOk;
}

int cmd_compare(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    auto [ps, removed] = load_dataset(cfg);
    std::optional<PointSet> sub;
    const PointSet* w = &ps;
    if (cfg.subsample > 0 && cfg.subsample < ps.size()) {
        sub = subsample(ps, cfg.subsample, cfg.seed);
        w = &*sub;
    }

    auto mle = make_spec(cfg, "mle");
    mle.k = cfg.k_list.empty() ? 5 : parse_counts(cfg.k_list, "k list").front();
    auto two = make_spec(cfg, "twonn");
    auto geo = make_spec(cfg, "geomle");
    auto path = make_spec(cfg, "geodesic");
    for (auto* s : {&mle, &two, &geo, &path})
        s->deduplicate = false;

    // One full-width search serves MLE, TwoNN, and GeoMLE when every row is an anchor.
    const auto width = std::max(mle.k, geomle_table_k(geo.geomle, w->size()));
    std::optional<NeighborTable> shared;
    if (width < w->size())
        shared = knn_all(*w, width);
    const NeighborTable* table = shared ? &*shared : nullptr;

    std::vector<std::pair<std::string, EstimateReport>> rows;
    rows.emplace_back("MLE (k=" + std::to_string(mle.k) + ")", estimate(*w, mle, table));
    rows.emplace_back("GeoMLE (k1=" + std::to_string(geo.geomle.k1) + ",k2=" + std::to_string(geo.geomle.k2) + ")",
                      estimate(*w, geo, table));
    rows.emplace_back("TwoNN", estimate(*w, two, table));
    rows.emplace_back("kNN Graph Distance", estimate(*w, path));

    Json j = envelope(cfg);
    j["dataset"] = dataset_json(cfg, ps, removed);
    j["dataset"]["n_used"] = w->size();
    j["alpha"] = cfg.alpha;
    j["results"] = Json::array();
    std::ostringstream table_text, csv;
    table_text << std::left << std::setw(28) << "estimator" << dataset_label(cfg) << "\n";
    csv << "estimator," << dataset_label(cfg) << "\n";
    for (auto& [label, r] : rows) {
        stamp(r, cfg, removed);
        auto rj = report_to_json(r);
        rj["label"] = label;
        j["results"].push_back(rj);
        table_text << std::setw(28) << label << fixed1(r.estimate) << "\n";
        csv << '"' << label << "\"," << std::setprecision(17) << r.estimate << "\n";
    }
    emit(cfg, j, table_text.str(), csv.str(), out);
    return kOk;
}

int cmd_convergence(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    auto spec = make_spec(cfg, cfg.estimator);
    if (!cfg.k_list.empty())
        spec.k = parse_counts(cfg.k_list, "k list").front();
    if (cfg.sizes.empty())
        throw ConfigError("--sizes is required");
    const auto sizes = parse_counts(cfg.sizes, "size list");
    const std::size_t reps = cfg.replicates > 1 ? cfg.replicates : 5;
    auto [ps, removed] = load_dataset(cfg);
    spec.deduplicate = false;

    const auto curve = convergence_curve(ps, spec, sizes, reps, cfg.seed);
    Json j = envelope(cfg);
    j["dataset"] = dataset_json(cfg, ps, removed);
    j["alpha"] = cfg.alpha;
    j["curve"] = curve_to_json(curve);
    j["curve"]["params"]["deduplicate"] = !cfg.no_dedup;

    std::ostringstream table, csv;
    write_curve_csv(curve, csv);
    table << std::left << std::setw(10) << "m" << std::setw(12) << "mean" << "stderr\n";
    for (std::size_t i = 0; i < curve.sample_sizes.size(); ++i)
        table << std::setw(10) << curve.sample_sizes[i] << std::setw(12) << fixed1(curve.mean_estimates[i])
              << std::fixed << std::setprecision(3) << curve.std_errors[i] << "\n";
    emit(cfg, j, table.str(), csv.str(), out);
    return kOk;
}

int cmd_generate(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    if (cfg.out.empty())
        throw ConfigError("--out is required");
    SyntheticSpec spec;
    try {
        spec.kind = parse_synthetic_kind(cfg.kind);
    } catch (const DatasetError& e) {
        throw ConfigError(e.what());
    }
    spec.d = cfg.d;
    spec.ambient = cfg.ambient;
    spec.n = cfg.n;
    spec.seed = cfg.seed;
    const auto ps = generate(spec);
    save_raw(ps, cfg.out,
             {{"synth.kind", std::string(to_string(spec.kind))},
              {"synth.d", std::to_string(spec.d)},
              {"synth.N", std::to_string(spec.ambient)},
              {"synth.n", std::to_string(spec.n)},
              {"synth.seed", std::to_string(spec.seed)}},
             cfg.f64);

    Json j = envelope(cfg);
    j["output"] = cfg.out;
    j["n"] = ps.size();
    j["N"] = ps.dim();
    emit(cfg, j, "wrote " + std::to_string(ps.size()) + " x " + std::to_string(ps.dim()) + " to " + cfg.out + "\n", "",
         out);
    return kOk;
}

int cmd_noise(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    if (cfg.out.empty())
        throw ConfigError("--out is required");
    NoiseSpec spec;
    try {
        spec.mode = parse_noise_mode(cfg.mode);
    } catch (const DatasetError& e) {
        throw ConfigError(e.what());
    }
    spec.d_noise = cfg.d_noise;
    spec.seed = cfg.seed;
    // Noise is applied to the data as loaded; duplicates are an estimator concern.
    PointSet ps = load(make_source(cfg));
    const auto noised = add_hypercube_noise(ps, spec);
    save_raw(noised, cfg.out,
             {{"noise.d", std::to_string(spec.d_noise)},
              {"noise.mode", std::string(to_string(spec.mode))},
              {"noise.seed", std::to_string(spec.seed)},
              {"noise.source", cfg.dataset}},
             cfg.f64);
    Json j = envelope(cfg);
    j["output"] = cfg.out;
    j["n"] = noised.size();
    j["N"] = noised.dim();
    emit(cfg, j, "wrote " + std::to_string(noised.size()) + " x " + std::to_string(noised.dim()) + " to " + cfg.out + "\n",
         "", out);
    return kOk;
}

int cmd_knn_cache(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    if (cfg.out.empty())
        throw ConfigError("--out is required");
    auto spec = make_spec(cfg, "mle");
    const auto ks = k_values(cfg, spec);
    const auto k = *std::max_element(ks.begin(), ks.end());
    auto [ps, removed] = load_dataset(cfg);
    std::optional<PointSet> sub;
    const PointSet* w = &ps;
    if (cfg.subsample > 0 && cfg.subsample < ps.size()) {
        sub = subsample(ps, cfg.subsample, cfg.seed);
        w = &*sub;
    }
    const auto anchors = draw_anchors(w->size(), cfg.alpha, cfg.seed);
    const auto table = knn(*w, anchors, k);
    save_neighbor_table(table, *w, cfg.out);

    Json j = envelope(cfg);
    j["dataset"] = dataset_json(cfg, ps, removed);
    j["output"] = cfg.out;
    j["k"] = k;
    j["anchors"] = anchors.size();
    j["alpha"] = cfg.alpha;
    emit(cfg, j, "cached k=" + std::to_string(k) + " neighbors of " + std::to_string(anchors.size()) + " anchors to " +
                     cfg.out + "\n", "", out);
    return kOk;
}

// ---------------------------------------------------------------------------
// Wiring
// ---------------------------------------------------------------------------

void add_dataset_options(CLI::App* sub, RunConfig& c, bool required = true) {
    auto* o = sub->add_option("--dataset", c.dataset, "kind:path, kind one of idx, cifar10-binary, csv, raw-tensor, image-directory");
    if (required)
        o->required();
    sub->add_flag("--no-scale", c.no_scale, "keep 8-bit pixel values instead of mapping to [0,1]");
    sub->add_flag("--csv-labels", c.csv_labels, "treat the last CSV column as an integer label");
    sub->add_option("--resize", c.resize, "nearest-neighbor resize target HxWxC");
    sub->add_option("--classes", c.classes, "comma-separated labels to keep");
    sub->add_option("--subsample", c.subsample, "rows to draw (per replicate when --replicates > 1)");
    sub->add_flag("--no-dedup", c.no_dedup, "keep exact duplicate rows");
}

void add_estimator_options(CLI::App* sub, RunConfig& c) {
    sub->add_option("--estimator", c.estimator, "mle, twonn, geomle, geodesic")->capture_default_str();
    sub->add_option("--k", c.k_list, "neighbor count or comma-separated list");
    sub->add_option("--aggregation", c.aggregation, "mackay or levina")->capture_default_str();
    sub->add_option("--normalization", c.normalization, "MLE numerator: k-1 (maximum likelihood) or k-2 (bias-corrected)")
        ->capture_default_str();
    sub->add_option("--alpha", c.alpha, "anchor fraction in (0,1]")->capture_default_str();
    sub->add_option("--discard", c.discard, "TwoNN discard fraction")->capture_default_str();
    sub->add_option("--k1", c.k1, "GeoMLE smallest k")->capture_default_str();
    sub->add_option("--k2", c.k2, "GeoMLE largest k")->capture_default_str();
    sub->add_option("--bootstraps", c.bootstraps, "GeoMLE bootstrap resamples")->capture_default_str();
    sub->add_option("--degree", c.degree, "GeoMLE polynomial degree")->capture_default_str();
    sub->add_option("--bins", c.bins, "geodesic histogram bins")->capture_default_str();
    sub->add_option("--sample-cap", c.sample_cap, "geodesic point cap")->capture_default_str();
    sub->add_option("--replicates", c.replicates, "replicate count")->capture_default_str();
    sub->add_option("--knn-cache", c.knn_cache, "neighbor table cache written by knn-cache");
}

void add_output_options(CLI::App* sub, RunConfig& c) {
    sub->add_option("--report", c.report, "write the JSON report here");
    sub->add_option("--csv", c.csv, "write the CSV table here");
    sub->add_option("--format", c.format, "stdout format: table or json")
        ->check(CLI::IsMember({"table", "json"}))
        ->capture_default_str();
}

int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.command == "estimate")
        return cmd_estimate(cfg, out, err);
    if (cfg.command == "compare")
        return cmd_compare(cfg, out, err);
    if (cfg.command == "convergence")
        return cmd_convergence(cfg, out, err);
    if (cfg.command == "generate")
        return cmd_generate(cfg, out, err);
    if (cfg.command == "noise")
        return cmd_noise(cfg, out, err);
    if (cfg.command == "knn-cache")
        return cmd_knn_cache(cfg, out, err);
    throw ConfigError("unknown command '" + cfg.command + "'");
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"Intrinsic dimension estimation for point clouds", "intdim"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--threads", cfg.threads, "worker cap (0 = all cores)")->envname("INTDIM_THREADS");
    app.add_option("--seed", cfg.seed, "master seed")->capture_default_str();
    app.set_version_flag("--version", std::string(kToolVersion));

    auto* estimate_cmd = app.add_subcommand("estimate", "estimate intrinsic dimension at one or more k");
    add_dataset_options(estimate_cmd, cfg);
    add_estimator_options(estimate_cmd, cfg);
    add_output_options(estimate_cmd, cfg);

    auto* compare_cmd = app.add_subcommand("compare", "run MLE, GeoMLE, TwoNN and the kNN-graph estimator side by side");
    add_dataset_options(compare_cmd, cfg);
    add_estimator_options(compare_cmd, cfg);
    add_output_options(compare_cmd, cfg);

    auto* conv_cmd = app.add_subcommand("convergence", "replicated estimates on subsamples of increasing size");
    add_dataset_options(conv_cmd, cfg);
    add_estimator_options(conv_cmd, cfg);
    add_output_options(conv_cmd, cfg);
    conv_cmd->add_option("--sizes", cfg.sizes, "comma-separated increasing subsample sizes")->required();

    auto* gen_cmd = app.add_subcommand("generate", "sample a synthetic manifold with known dimension");
    gen_cmd->add_option("--kind", cfg.kind, "hypercube, hypersphere, affine")->capture_default_str();
    gen_cmd->add_option("--d", cfg.d, "intrinsic dimension")->required();
    gen_cmd->add_option("--N", cfg.ambient, "ambient dimension")->required();
    gen_cmd->add_option("--n", cfg.n, "number of points")->required();
    gen_cmd->add_option("--out", cfg.out, "raw tensor output path")->required();
    gen_cmd->add_flag("--f64", cfg.f64, "store doubles instead of floats");
    add_output_options(gen_cmd, cfg);

    auto* noise_cmd = app.add_subcommand("noise", "raise a dataset's intrinsic dimension with hypercube noise");
    add_dataset_options(noise_cmd, cfg);
    noise_cmd->add_option("--d-noise", cfg.d_noise, "noise dimension")->required();
    noise_cmd->add_option("--mode", cfg.mode, "replace-pixels or add")->capture_default_str();
    noise_cmd->add_option("--out", cfg.out, "raw tensor output path")->required();
    noise_cmd->add_flag("--f64", cfg.f64, "store doubles instead of floats");
    add_output_options(noise_cmd, cfg);

    auto* cache_cmd = app.add_subcommand("knn-cache", "precompute a neighbor table for later estimate runs");
    add_dataset_options(cache_cmd, cfg);
    add_estimator_options(cache_cmd, cfg);
    cache_cmd->add_option("--out", cfg.out, "cache path")->required();
    add_output_options(cache_cmd, cfg);

    try {
        auto argv = expand_config(args);
        std::reverse(argv.begin(), argv.end());
        app.parse(argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::CallForVersion&) {
        out << kToolName << " " << kToolVersion << "\n";
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    }
    for (auto* sub : app.get_subcommands())
        cfg.command = sub->get_name();

    try {
        set_max_threads(cfg.threads);
        return dispatch(cfg, out, err);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const DatasetError& e) {
        err << "dataset error: " << e.what() << "\n";
        return kDatasetError;
    } catch (const KnnError& e) {
        err << "neighbor search error: " << e.what() << "\n";
        return kKnnError;
    } catch (const EstimatorError& e) {
        err << "estimator error: " << e.what() << "\n";
        return kEstimatorError;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kInternalError;
    }
}

} // namespace intdim::cli
