#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "zerocast/anova.hpp"
#include "zerocast/checkpoint.hpp"
#include "zerocast/csv.hpp"
#include "zerocast/errors.hpp"
#include "zerocast/forecast.hpp"
#include "zerocast/global.hpp"
#include "zerocast/iets.hpp"
#include "zerocast/isq.hpp"
#include "zerocast/metrics.hpp"
#include "zerocast/nets.hpp"
#include "zerocast/rng.hpp"
#include "zerocast/series.hpp"
#include "zerocast/synthetic.hpp"
#include "zerocast/train.hpp"

using namespace zerocast;

namespace {

// A --config file is a flat JSON object keyed by long option names. Its
// values are spliced into the argument list as "--key value" pairs before
// parsing, skipping any key the command line already sets, so explicit flags
// win and CLI11 applies its usual conversion and requirement checks.
void splice_config(const std::vector<CLI::App*>& cmds, std::vector<std::string>& args) {
    std::size_t sub_at = args.size();
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (!args[i].empty() && args[i][0] != '-') {
            sub_at = i;
            break;
        }
    }
    if (sub_at == args.size()) return;
    CLI::App* cmd = nullptr;
    for (CLI::App* c : cmds) {
        if (c->get_name() == args[sub_at]) cmd = c;
    }
    if (cmd == nullptr) return;

    std::string config_path;
    std::set<std::string> given;
    for (std::size_t i = sub_at + 1; i < args.size(); ++i) {
        const std::string& tok = args[i];
        if (tok.rfind("--", 0) != 0) continue;
        const std::size_t eq = tok.find('=');
        const std::string name =
            eq == std::string::npos ? tok.substr(2) : tok.substr(2, eq - 2);
        given.insert(name);
        if (name == "config" && config_path.empty()) {
            if (eq != std::string::npos) {
                config_path = tok.substr(eq + 1);
            } else if (i + 1 < args.size()) {
                config_path = args[i + 1];
            }
        }
    }
    if (config_path.empty()) return;

    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot read config file '" + config_path + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file '" + config_path + "' is not valid JSON: " + e.what());
    }
    if (!doc.is_object()) {
        throw ConfigError("config file '" + config_path + "' must hold a JSON object");
    }

    std::set<std::string> known;
    for (const CLI::Option* opt : cmd->get_options()) {
        for (const std::string& n : opt->get_lnames()) known.insert(n);
    }
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        const std::string& key = it.key();
        if (key == "config" || key == "force" || key == "help") {
            throw ConfigError("config file '" + config_path + "' may not set '" + key + "'");
        }
        if (known.find(key) == known.end()) {
            throw ConfigError("config file '" + config_path + "' sets '" + key +
                              "', which is not an option of '" + cmd->get_name() + "'");
        }
        if (given.count(key) > 0) continue;
        const nlohmann::json& v = it.value();
        if (v.is_boolean()) {
            if (v.get<bool>()) args.push_back("--" + key);
        } else if (v.is_string()) {
            args.push_back("--" + key);
            args.push_back(v.get<std::string>());
        } else if (v.is_number()) {
            args.push_back("--" + key);
            args.push_back(v.dump());
        } else {
            throw ConfigError("config value '" + key + "' in '" + config_path +
                              "' must be a scalar");
        }
    }
}

void refuse_overwrite(const std::string& path, bool force) {
    if (!force && std::filesystem::exists(path)) {
        throw ConfigError("output '" + path + "' already exists; pass --force to overwrite");
    }
}

// All file outputs go through a temp file plus rename so readers never see a
// half-written artifact.
template <typename Fn>
void write_atomic(const std::string& path, Fn&& fn) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw SchemaError("cannot open '" + tmp + "' for writing");
        fn(out);
        out.flush();
        if (!out) throw SchemaError("failed writing '" + tmp + "'");
    }
    std::filesystem::rename(tmp, path);
}

std::string with_extension(const std::string& path, const char* ext) {
    std::filesystem::path p(path);
    p.replace_extension(ext);
    return p.string();
}

// Per-run checkpoint path: the plain --out for a single run, otherwise the
// seed spliced in before the extension so runs never collide.
std::string run_path(const std::string& out, std::uint64_t seed, int runs) {
    if (runs == 1) return out;
    std::filesystem::path p(out);
    const std::string ext = p.extension().string();
    p.replace_extension();
    return p.string() + "-seed" + std::to_string(seed) + ext;
}

int default_kernel(int context) { return std::min(25, 2 * context - 1); }

RunConfig frame_config(const std::string& freq, int context, int horizon, int train_end,
                       int batch_size, std::uint64_t seed) {
    RunConfig rc;
    rc.freq = parse_freq(freq);
    rc.context = context;
    rc.horizon = horizon;
    rc.train_end = train_end;
    rc.batch_size = batch_size;
    rc.seed = seed;
    return rc;
}

void add_frame_options(CLI::App* cmd, std::string& freq, int& context, int& horizon,
                       int& train_end) {
    cmd->add_option("--freq", freq, "Series frequency: daily or monthly")
        ->default_str("daily");
    cmd->add_option("--context", context, "Context window length c")->required();
    cmd->add_option("--horizon", horizon, "Forecast horizon h")->required();
    cmd->add_option("--train-end", train_end,
                    "Last training time index; the test window is the h steps after it")
        ->required();
}

struct GenArgs {
    std::string out;
    std::string kind;
    double r = 0.0, p = 0.0, pi = 0.0, mu = 0.0, phi = 0.0, rho = 0.0;
    int n = 0, len = 0;
    std::uint64_t seed = 1;
    int season_period = 0;
    double season_amplitude = 0.0;
    bool force = false;
    CLI::Option* opt_r = nullptr;
    CLI::Option* opt_p = nullptr;
    CLI::Option* opt_pi = nullptr;
    CLI::Option* opt_mu = nullptr;
    CLI::Option* opt_phi = nullptr;
    CLI::Option* opt_rho = nullptr;
};

void run_gen(const GenArgs& a) {
    const HeadKind kind = parse_head(a.kind);
    auto need = [&](const CLI::Option* opt, const char* flag) {
        if (opt->count() == 0) {
            throw ConfigError(std::string("gen: --") + flag + " is required for kind '" + a.kind +
                              "'");
        }
    };
    DistParams params;
    nlohmann::json sidecar;
    sidecar["kind"] = a.kind;
    if (kind == HeadKind::negbin) {
        need(a.opt_r, "r");
        need(a.opt_p, "p");
        params = NegBinParams{a.r, a.p};
        sidecar["r"] = a.r;
        sidecar["p"] = a.p;
    } else if (kind == HeadKind::hsnb) {
        need(a.opt_pi, "pi");
        need(a.opt_r, "r");
        need(a.opt_p, "p");
        params = HsnbParams{a.pi, a.r, a.p};
        sidecar["pi"] = a.pi;
        sidecar["r"] = a.r;
        sidecar["p"] = a.p;
    } else {
        need(a.opt_mu, "mu");
        need(a.opt_phi, "phi");
        need(a.opt_rho, "rho");
        params = TweedieParams{a.mu, a.phi, a.rho};
        sidecar["mu"] = a.mu;
        sidecar["phi"] = a.phi;
        sidecar["rho"] = a.rho;
    }
    sidecar["n"] = a.n;
    sidecar["len"] = a.len;
    sidecar["seed"] = a.seed;
    sidecar["season-period"] = a.season_period;
    sidecar["season-amplitude"] = a.season_amplitude;

    const SeasonalSpec seasonal{a.season_period, a.season_amplitude};
    const std::vector<TimeSeries> series = gen_synthetic(params, a.n, a.len, a.seed, seasonal);

    const std::string side = with_extension(a.out, ".json");
    refuse_overwrite(a.out, a.force);
    refuse_overwrite(side, a.force);
    write_atomic(a.out, [&](std::ostream& os) {
        os << "id,t,value\n";
        for (const auto& s : series) {
            for (std::size_t k = 0; k < s.values.size(); ++k) {
                os << s.id << ',' << (k + 1) << ',' << detail::format_double(s.values[k]) << '\n';
            }
        }
    });
    write_atomic(side, [&](std::ostream& os) { os << sidecar.dump(2) << '\n'; });
    std::cout << "wrote " << a.n << " series of length " << a.len << " to " << a.out
              << " (parameters in " << side << ")\n";
}

struct TrainArgs {
    std::string data, out;
    std::string freq = "daily";
    int context = 0, horizon = 0, train_end = 0;
    std::string model;
    std::string head = "negbin";
    int kernel = 0;
    int batch_size = 32, max_epochs = 200, patience = 10, batches_per_epoch = 50;
    double lr = 1e-3, clip_norm = 10.0;
    std::uint64_t seed = 1;
    int runs = 1;
    bool force = false;
    CLI::Option* opt_kernel = nullptr;
};

void run_train(const TrainArgs& a) {
    if (a.runs < 1) throw ConfigError("train: --runs must be at least 1");
    ModelSpec spec;
    spec.kind = parse_model(a.model);
    spec.head = parse_head(a.head);
    spec.context = a.context;
    spec.horizon = a.horizon;
    spec.kernel = a.opt_kernel->count() > 0 ? a.kernel : default_kernel(a.context);

    const Dataset ds =
        load_csv(a.data, frame_config(a.freq, a.context, a.horizon, a.train_end, a.batch_size, a.seed));

    TrainConfig tc;
    tc.batch_size = a.batch_size;
    tc.max_epochs = a.max_epochs;
    tc.patience = a.patience;
    tc.lr = a.lr;
    tc.clip_norm = a.clip_norm;
    tc.batches_per_epoch = a.batches_per_epoch;

    for (int k = 0; k < a.runs; ++k) {
        tc.seed = a.seed + static_cast<std::uint64_t>(k);
        const std::string ckpt = run_path(a.out, tc.seed, a.runs);
        const std::string log = with_extension(ckpt, ".log.csv");
        refuse_overwrite(ckpt, a.force);
        refuse_overwrite(log, a.force);

        const TrainResult res = train(spec, ds, tc);
        save_checkpoint(res.net, ckpt);
        write_atomic(log, [&](std::ostream& os) {
            os << "epoch,train_nll,val_nll,best_val\n";
            double best = kInf;
            for (const auto& e : res.log) {
                best = std::min(best, e.val_nll);
                os << e.epoch << ',' << detail::format_double(e.train_nll) << ','
                   << detail::format_double(e.val_nll) << ',' << detail::format_double(best)
                   << '\n';
            }
        });
        std::cout << "seed " << tc.seed << ": best validation nll "
                  << detail::format_double(res.best_val) << " at epoch " << res.best_epoch
                  << " -> " << ckpt << "\n";
    }
}

struct ForecastArgs {
    std::string data, out;
    std::string freq = "daily";
    int context = 0, horizon = 0, train_end = 0;
    std::string model;
    std::string checkpoint;
    std::uint64_t seed = 1;
    int samples = 10000;
    bool force = false;
};

void run_forecast(const ForecastArgs& a) {
    const Dataset ds =
        load_csv(a.data, frame_config(a.freq, a.context, a.horizon, a.train_end, 32, a.seed));
    const ModelKind kind = parse_model(a.model);
    const SplitView split = ds.split();

    std::vector<QuantileForecast> fcs;
    if (kind == ModelKind::isq) {
        for (const auto& ts : ds.series) fcs.push_back(isq_forecast(ts, split));
    } else if (kind == ModelKind::iets) {
        for (std::size_t i = 0; i < ds.series.size(); ++i) {
            const CrostonState st = iets_lite_fit(ds.series[i], split);
            fcs.push_back(iets_lite_forecast(st, ds.horizon, a.samples, derive_seed(a.seed, i)));
        }
    } else {
        if (a.checkpoint.empty()) {
            throw ConfigError("forecast: --checkpoint is required for model '" + a.model + "'");
        }
        const Network net = load_checkpoint(a.checkpoint);
        if (net.spec.kind != kind) {
            throw ConfigError(std::string("forecast: checkpoint holds a '") +
                              model_name(net.spec.kind) + "' model, not '" + a.model + "'");
        }
        fcs = global_forecast(net, ds);
    }

    int padded = 0, degenerate = 0;
    for (const auto& fc : fcs) {
        validate_forecast(fc);
        padded += fc.padded ? 1 : 0;
        degenerate += fc.degenerate ? 1 : 0;
    }
    refuse_overwrite(a.out, a.force);
    write_atomic(a.out, [&](std::ostream& os) { write_forecast_csv(os, fcs); });
    std::cout << "wrote forecasts for " << fcs.size() << " series to " << a.out;
    if (padded > 0) std::cout << " (" << padded << " padded)";
    if (degenerate > 0) std::cout << " (" << degenerate << " degenerate)";
    std::cout << "\n";
}

struct EvaluateArgs {
    std::string data, forecast, out, per_series;
    std::string freq = "daily";
    int context = 0, horizon = 0, train_end = 0;
    std::string dataset_name = "dataset";
    std::string model;
    std::string head = "none";
    int run = 0;
    bool force = false;
};

void run_evaluate(const EvaluateArgs& a) {
    const Dataset ds =
        load_csv(a.data, frame_config(a.freq, a.context, a.horizon, a.train_end, 32, 1));
    const std::vector<QuantileForecast> fcs = read_forecast_csv(a.forecast);

    std::unordered_map<std::string, const QuantileForecast*> by_id;
    for (const auto& fc : fcs) by_id[fc.id] = &fc;
    auto join_ids = [](const std::vector<std::string>& ids) {
        std::string s;
        for (std::size_t i = 0; i < ids.size() && i < 8; ++i) {
            if (i) s += ", ";
            s += ids[i];
        }
        if (ids.size() > 8) s += ", ...";
        return s;
    };
    std::vector<std::string> missing, extra;
    for (const auto& ts : ds.series) {
        if (by_id.find(ts.id) == by_id.end()) missing.push_back(ts.id);
    }
    if (by_id.size() != ds.series.size() || !missing.empty()) {
        std::unordered_map<std::string, int> in_ds;
        for (const auto& ts : ds.series) in_ds[ts.id] = 1;
        for (const auto& fc : fcs) {
            if (in_ds.find(fc.id) == in_ds.end()) extra.push_back(fc.id);
        }
    }
    if (!missing.empty() || !extra.empty()) {
        std::string msg = "evaluate: forecast ids do not match the dataset";
        if (!missing.empty()) msg += "; missing [" + join_ids(missing) + "]";
        if (!extra.empty()) msg += "; extra [" + join_ids(extra) + "]";
        throw IntegrityError(msg);
    }

    const SplitView split = ds.split();
    std::vector<std::array<SeriesScore, kMetrics.size()>> table(ds.series.size());
    for (std::size_t i = 0; i < ds.series.size(); ++i) {
        for (std::size_t j = 0; j < kMetrics.size(); ++j) {
            table[i][j] = score_metric(ds.series[i], *by_id[ds.series[i].id], split, kMetrics[j]);
        }
    }

    std::vector<ScoreRecord> rows;
    for (std::size_t j = 0; j < kMetrics.size(); ++j) {
        std::vector<SeriesScore> column;
        for (const auto& r : table) column.push_back(r[j]);
        ScoreRecord record{a.dataset_name, a.model, a.head, a.run, kMetrics[j], 0.0, false};
        try {
            const AggregateResult agg = aggregate(column);
            record.value = agg.value;
            std::cout << metric_name(kMetrics[j]) << ": " << detail::format_double(agg.value)
                      << " (" << agg.used << " series";
            if (agg.skipped > 0) std::cout << ", " << agg.skipped << " flagged";
            std::cout << ")\n";
        } catch (const EmptyAggregateError&) {
            record.value = std::numeric_limits<double>::quiet_NaN();
            record.flagged = true;
            std::cerr << "warning: every series is flagged for " << metric_name(kMetrics[j])
                      << "\n";
        }
        rows.push_back(std::move(record));
    }

    if (!a.per_series.empty()) {
        refuse_overwrite(a.per_series, a.force);
        write_atomic(a.per_series, [&](std::ostream& os) {
            os << "id,metric,value,flagged\n";
            for (std::size_t i = 0; i < ds.series.size(); ++i) {
                for (std::size_t j = 0; j < kMetrics.size(); ++j) {
                    const SeriesScore& s = table[i][j];
                    os << ds.series[i].id << ',' << metric_name(kMetrics[j]) << ','
                       << (s.flagged ? "nan" : detail::format_double(s.value)) << ','
                       << (s.flagged ? 1 : 0) << '\n';
                }
            }
        });
    }

    // The scores table is append-only: new aggregate rows join whatever is
    // already there, and re-scoring the same cell needs --force.
    std::vector<ScoreRecord> all;
    if (std::filesystem::exists(a.out)) all = read_scores_csv(a.out);
    auto same_cell = [&](const ScoreRecord& r) {
        return r.dataset == a.dataset_name && r.model == a.model && r.head == a.head &&
               r.run == a.run;
    };
    const bool dup = std::any_of(all.begin(), all.end(), same_cell);
    if (dup && !a.force) {
        throw IntegrityError("evaluate: scores for (" + a.dataset_name + ", " + a.model + ", " +
                             a.head + ", run " + std::to_string(a.run) + ") already present in '" +
                             a.out + "'; pass --force to replace them");
    }
    if (dup) all.erase(std::remove_if(all.begin(), all.end(), same_cell), all.end());
    all.insert(all.end(), rows.begin(), rows.end());
    write_atomic(a.out, [&](std::ostream& os) { write_scores_csv(os, all); });
    std::cout << "wrote " << rows.size() << " aggregate rows to " << a.out << "\n";
}

struct CompareArgs {
    std::string data, out;
    bool interaction = false;
    std::string reference_level;
    std::string reference_metric = "sQL0.5";
    bool force = false;
    CLI::Option* opt_reference_level = nullptr;
};

void run_compare(const CompareArgs& a) {
    const std::vector<ScoreRecord> records = read_scores_csv(a.data);
    const std::string ref_level = a.opt_reference_level->count() > 0
                                      ? a.reference_level
                                      : (a.interaction ? "negbin" : "dlinear");
    AnovaResult res;
    try {
        res = anova(records, ref_level, a.reference_metric, a.interaction);
    } catch (const DesignError& e) {
        throw DesignError(std::string(e.what()) + "\nhint: every " +
                          (a.interaction ? "head" : "model") +
                          " needs scores on every metric and more records than coefficients; a "
                          "level scored on only one metric makes its column collinear");
    }
    std::cout << format_anova_table(res);
    if (!a.out.empty()) {
        refuse_overwrite(a.out, a.force);
        write_atomic(a.out, [&](std::ostream& os) { write_anova_csv(os, res); });
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Intermittent demand forecasting: synthetic data, local and global models, "
                 "scoring and model comparison"};
    app.require_subcommand(1);

    GenArgs gen;
    CLI::App* cmd_gen = app.add_subcommand("gen", "Generate a synthetic demand corpus");
    cmd_gen->add_option("--out", gen.out,
                        "Output CSV path; the generator settings go to a .json sidecar that "
                        "doubles as a --config file")
        ->required();
    cmd_gen->add_option("--kind", gen.kind, "Generating distribution: negbin, hsnb or tweedie")
        ->required();
    gen.opt_r = cmd_gen->add_option("--r", gen.r, "Negative binomial size r");
    gen.opt_p = cmd_gen->add_option("--p", gen.p, "Negative binomial success probability p");
    gen.opt_pi = cmd_gen->add_option("--pi", gen.pi, "Hurdle occurrence probability");
    gen.opt_mu = cmd_gen->add_option("--mu", gen.mu, "Tweedie mean");
    gen.opt_phi = cmd_gen->add_option("--phi", gen.phi, "Tweedie dispersion");
    gen.opt_rho = cmd_gen->add_option("--rho", gen.rho, "Tweedie power in (1,2)");
    cmd_gen->add_option("--n", gen.n, "Number of series")->required();
    cmd_gen->add_option("--len", gen.len, "Length of every series")->required();
    cmd_gen->add_option("--seed", gen.seed, "Base random seed")->capture_default_str();
    cmd_gen->add_option("--season-period", gen.season_period,
                        "Occurrence seasonality period (0 disables)")
        ->capture_default_str();
    cmd_gen->add_option("--season-amplitude", gen.season_amplitude,
                        "Occurrence seasonality amplitude in [0,1]")
        ->capture_default_str();
    cmd_gen->add_flag("--force", gen.force, "Overwrite existing outputs");

    TrainArgs tr;
    CLI::App* cmd_train = app.add_subcommand("train", "Train a global model on a dataset");
    cmd_train->add_option("--data", tr.data, "Input dataset CSV (id,t,value)")->required();
    cmd_train->add_option("--out", tr.out,
                          "Checkpoint path; with --runs > 1 the seed is spliced in before the "
                          "extension, and each checkpoint gets a .log.csv")
        ->required();
    add_frame_options(cmd_train, tr.freq, tr.context, tr.horizon, tr.train_end);
    cmd_train->add_option("--model", tr.model, "Global model: fnn or dlinear")->required();
    cmd_train->add_option("--head", tr.head, "Distribution head: negbin, hsnb or tweedie")
        ->capture_default_str();
    tr.opt_kernel = cmd_train->add_option(
        "--kernel", tr.kernel,
        "Moving-average kernel (odd, <= 2*context-1); defaults to min(25, 2*context-1)");
    cmd_train->add_option("--batch-size", tr.batch_size, "Series per batch")->capture_default_str();
    cmd_train->add_option("--max-epochs", tr.max_epochs, "Epoch cap")->capture_default_str();
    cmd_train->add_option("--patience", tr.patience, "Early-stopping patience in epochs")
        ->capture_default_str();
    cmd_train->add_option("--lr", tr.lr, "Adam learning rate")->capture_default_str();
    cmd_train->add_option("--clip-norm", tr.clip_norm, "Gradient clipping norm")
        ->capture_default_str();
    cmd_train->add_option("--batches-per-epoch", tr.batches_per_epoch, "Batches per epoch")
        ->capture_default_str();
    cmd_train->add_option("--seed", tr.seed, "Base seed; run k uses seed+k")->capture_default_str();
    cmd_train->add_option("--runs", tr.runs, "Number of training runs")->capture_default_str();
    cmd_train->add_flag("--force", tr.force, "Overwrite existing outputs");

    ForecastArgs fo;
    CLI::App* cmd_forecast =
        app.add_subcommand("forecast", "Produce quantile forecasts for every series");
    cmd_forecast->add_option("--data", fo.data, "Input dataset CSV (id,t,value)")->required();
    cmd_forecast->add_option("--out", fo.out, "Output forecast CSV")->required();
    add_frame_options(cmd_forecast, fo.freq, fo.context, fo.horizon, fo.train_end);
    cmd_forecast->add_option("--model", fo.model, "Model: isq, iets, fnn or dlinear")->required();
    cmd_forecast->add_option("--checkpoint", fo.checkpoint,
                             "Trained checkpoint (required for fnn and dlinear)");
    cmd_forecast->add_option("--seed", fo.seed, "Seed for simulation forecasts")
        ->capture_default_str();
    cmd_forecast->add_option("--samples", fo.samples, "Simulation paths per series (iets)")
        ->capture_default_str();
    cmd_forecast->add_flag("--force", fo.force, "Overwrite existing outputs");

    EvaluateArgs ev;
    CLI::App* cmd_evaluate =
        app.add_subcommand("evaluate", "Score a forecast file against the test window");
    cmd_evaluate->add_option("--data", ev.data, "Input dataset CSV (id,t,value)")->required();
    cmd_evaluate->add_option("--forecast", ev.forecast, "Forecast CSV to score")->required();
    cmd_evaluate->add_option("--out", ev.out,
                             "Scores CSV; existing rows are kept and new rows appended")
        ->required();
    cmd_evaluate->add_option("--per-series", ev.per_series,
                             "Optional per-series score CSV (id,metric,value,flagged)");
    add_frame_options(cmd_evaluate, ev.freq, ev.context, ev.horizon, ev.train_end);
    cmd_evaluate->add_option("--dataset-name", ev.dataset_name, "Dataset label for the score rows")
        ->capture_default_str();
    cmd_evaluate->add_option("--model", ev.model, "Model label for the score rows")->required();
    cmd_evaluate->add_option("--head", ev.head, "Head label for the score rows")
        ->capture_default_str();
    cmd_evaluate->add_option("--run", ev.run, "Run index label for the score rows")
        ->capture_default_str();
    cmd_evaluate->add_flag("--force", ev.force, "Replace rows for the same (dataset, model, head, run)");

    CompareArgs co;
    CLI::App* cmd_compare =
        app.add_subcommand("compare", "Fit the score regression and print the coefficient table");
    cmd_compare->add_option("--data", co.data, "Scores CSV produced by evaluate")->required();
    cmd_compare->add_flag("--interaction", co.interaction,
                          "Cross heads with metrics instead of the additive model/metric form");
    co.opt_reference_level = cmd_compare->add_option(
        "--reference-level", co.reference_level,
        "Reference model (additive) or head (interaction); defaults to dlinear / negbin");
    cmd_compare->add_option("--reference-metric", co.reference_metric, "Reference metric")
        ->capture_default_str();
    cmd_compare->add_option("--out", co.out, "Optional coefficient CSV");
    cmd_compare->add_flag("--force", co.force, "Overwrite existing outputs");

    const std::vector<CLI::App*> cmds{cmd_gen, cmd_train, cmd_forecast, cmd_evaluate, cmd_compare};
    std::string config_path;
    for (CLI::App* cmd : cmds) {
        cmd->add_option("--config", config_path,
                        "JSON file of option values keyed by long option name; explicit flags win");
    }

    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        splice_config(cmds, args);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    std::reverse(args.begin(), args.end());
    try {
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (cmd_gen->parsed()) run_gen(gen);
        if (cmd_train->parsed()) run_train(tr);
        if (cmd_forecast->parsed()) run_forecast(fo);
        if (cmd_evaluate->parsed()) run_evaluate(ev);
        if (cmd_compare->parsed()) run_compare(co);
        return 0;
    } catch (const SchemaError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const IntegrityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const EmptyAggregateError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const NumericsError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const TrainingDiagnosticError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
}
