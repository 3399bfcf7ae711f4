#include "mvbm/harness.hpp"

#include "mvbm/io.hpp"
#include "mvbm/parallel.hpp"
#include "mvbm/rng.hpp"
#include "mvbm/solver.hpp"
#include "mvbm/strategies.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace mvbm {

std::string to_string(ExperimentKind kind) {
    switch (kind) {
    case ExperimentKind::CompareFirstAgent: return "compare-first-agent";
    case ExperimentKind::MpugCurve: return "mpug-curve";
    case ExperimentKind::PmaPmi: return "pma-pmi";
    case ExperimentKind::RandomizedVsDeterministic: return "randomized-vs-deterministic";
    }
    return "?";
}

ExperimentKind experiment_from_string(const std::string& name) {
    for (auto k : {ExperimentKind::CompareFirstAgent, ExperimentKind::MpugCurve, ExperimentKind::PmaPmi,
                   ExperimentKind::RandomizedVsDeterministic})
        if (to_string(k) == name) return k;
    throw Error("unknown experiment '" + name + "'");
}

ExperimentConfig ExperimentConfig::defaults(ExperimentKind kind) {
    ExperimentConfig cfg;
    cfg.kind = kind;
    switch (kind) {
    case ExperimentKind::CompareFirstAgent:
        cfg.ns = {20, 40, 60, 80};
        cfg.ms = {30, 50, 70};
        cfg.ps = {0.4, 0.6, 0.8};
        cfg.capacities = {{3, 3}};
        break;
    case ExperimentKind::MpugCurve:
        cfg.ns = {10, 15, 20};
        cfg.ms = {100, 125, 150, 175, 200};
        cfg.ps = {0.2};
        cfg.capacities = {{3, 7}};
        break;
    case ExperimentKind::PmaPmi:
        cfg.ns = {10, 15, 20};
        cfg.ms = {100, 125, 150, 175, 200};
        cfg.ps = {0.1, 0.2, 0.4};
        cfg.capacities = {{1, 5}};
        break;
    case ExperimentKind::RandomizedVsDeterministic:
        cfg.ns = {15, 20, 25};
        cfg.ms = {25, 30};
        cfg.ps = {0.2, 0.3};
        cfg.capacities = {{3, 3}};
        cfg.iterations = 100;
        break;
    }
    return cfg;
}

void validate_experiment_config(const ExperimentConfig& cfg) {
    if (cfg.ns.empty() || cfg.ms.empty() || cfg.ps.empty() || cfg.capacities.empty())
        throw Error("experiment: every grid axis must be non-empty");
    if (cfg.iterations < 1) throw Error("experiment: iterations must be >= 1");
    for (int n : cfg.ns)
        if (n < 1) throw Error("experiment: n must be >= 1");
    for (int m : cfg.ms)
        if (m < 0) throw Error("experiment: m must be >= 0");
    for (const auto& c : grid_cells(cfg)) validate_gen_config(cell_gen_config(cfg, c));
    if (cfg.kind == ExperimentKind::MpugCurve || cfg.kind == ExperimentKind::PmaPmi) {
        if (cfg.thresholds.empty()) throw Error("experiment: thresholds must be non-empty");
        for (double t : cfg.thresholds)
            if (!std::isfinite(t)) throw Error("experiment: thresholds must be finite");
    }
    if (cfg.kind == ExperimentKind::RandomizedVsDeterministic) {
        if (cfg.orders.empty()) throw Error("experiment: orders must be non-empty");
        for (int k : cfg.orders)
            if (k < 0) throw Error("experiment: orders must be >= 0");
        if (cfg.mc_trials < 1) throw Error("experiment: mc_trials must be >= 1");
    }
}

nlohmann::json experiment_config_to_json(const ExperimentConfig& cfg) {
    nlohmann::json caps = nlohmann::json::array();
    for (const auto& c : cfg.capacities) caps.push_back({c.low, c.high});
    nlohmann::json j = {{"kind", to_string(cfg.kind)},
                        {"n", cfg.ns},
                        {"m", cfg.ms},
                        {"p", cfg.ps},
                        {"capacity", caps},
                        {"iterations", cfg.iterations},
                        {"thresholds", cfg.thresholds},
                        {"orders", cfg.orders},
                        {"mc_trials", cfg.mc_trials},
                        {"seed", cfg.seed},
                        {"value_mean", cfg.value_mean},
                        {"value_sigma", cfg.value_sigma}};
    if (cfg.csv_path) j["csv"] = *cfg.csv_path;
    if (cfg.json_path) j["json"] = *cfg.json_path;
    if (cfg.svg_path) j["svg"] = *cfg.svg_path;
    return j;
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& j, std::optional<ExperimentKind> kind) {
    static const std::set<std::string> known = {"kind", "n", "m", "p", "capacity", "iterations",
                                                "thresholds", "orders", "mc_trials", "seed",
                                                "value_mean", "value_sigma", "csv", "json", "svg"};
    try {
        if (!j.is_object()) throw Error("experiment config must be a JSON object");
        for (const auto& [key, _] : j.items())
            if (!known.count(key)) throw Error("experiment config: unknown key '" + key + "'");
        if (j.contains("kind")) {
            ExperimentKind k = experiment_from_string(j.at("kind").get<std::string>());
            if (kind && *kind != k) throw Error("experiment config: kind does not match the subcommand");
            kind = k;
        }
        if (!kind) throw Error("experiment config: kind missing");
        ExperimentConfig cfg = ExperimentConfig::defaults(*kind);
        if (j.contains("n")) cfg.ns = j.at("n").get<std::vector<int>>();
        if (j.contains("m")) cfg.ms = j.at("m").get<std::vector<int>>();
        if (j.contains("p")) cfg.ps = j.at("p").get<std::vector<double>>();
        if (j.contains("capacity")) {
            cfg.capacities.clear();
            for (const auto& c : j.at("capacity")) {
                if (c.is_number_integer()) {
                    cfg.capacities.push_back({c.get<int>(), c.get<int>()});
                } else {
                    if (!c.is_array() || c.size() != 2) throw Error("experiment config: capacity entries are b or [low, high]");
                    cfg.capacities.push_back({c.at(0).get<int>(), c.at(1).get<int>()});
                }
            }
        }
        cfg.iterations = j.value("iterations", cfg.iterations);
        if (j.contains("thresholds")) cfg.thresholds = j.at("thresholds").get<std::vector<double>>();
        if (j.contains("orders")) cfg.orders = j.at("orders").get<std::vector<int>>();
        cfg.mc_trials = j.value("mc_trials", cfg.mc_trials);
        cfg.seed = j.value("seed", cfg.seed);
        cfg.value_mean = j.value("value_mean", cfg.value_mean);
        cfg.value_sigma = j.value("value_sigma", cfg.value_sigma);
        if (j.contains("csv")) cfg.csv_path = j.at("csv").get<std::string>();
        if (j.contains("json")) cfg.json_path = j.at("json").get<std::string>();
        if (j.contains("svg")) cfg.svg_path = j.at("svg").get<std::string>();
        validate_experiment_config(cfg);
        return cfg;
    } catch (const nlohmann::json::exception& ex) {
        throw Error(std::string("malformed experiment config: ") + ex.what());
    }
}

std::vector<GridCell> grid_cells(const ExperimentConfig& cfg) {
    std::vector<GridCell> cells;
    for (int n : cfg.ns)
        for (int m : cfg.ms)
            for (double p : cfg.ps)
                for (const auto& c : cfg.capacities) cells.push_back({n, m, p, c});
    return cells;
}

GenConfig cell_gen_config(const ExperimentConfig& cfg, const GridCell& cell) {
    GenConfig g;
    g.n = cell.n;
    g.m = cell.m;
    g.p = cell.p;
    g.capacity_low = cell.capacity.low;
    g.capacity_high = cell.capacity.high;
    g.value_mean = cfg.value_mean;
    g.value_sigma = cfg.value_sigma;
    g.seed = derive_seed(cfg.seed, {static_cast<std::uint64_t>(cell.n), static_cast<std::uint64_t>(cell.m),
                                    std::bit_cast<std::uint64_t>(cell.p),
                                    static_cast<std::uint64_t>(cell.capacity.low),
                                    static_cast<std::uint64_t>(cell.capacity.high)});
    return g;
}

const Metric& ResultRow::metric(const std::string& name) const {
    for (const auto& m : metrics)
        if (m.name == name) return m;
    throw Error("results: no metric '" + name + "'");
}

Metric summarize(const std::string& name, const std::vector<double>& samples) {
    Metric m;
    m.name = name;
    m.samples = samples.size();
    if (samples.empty()) return m;
    const double count = static_cast<double>(samples.size());
    m.value = pairwise_sum(samples) / count;
    if (samples.size() >= 2) {
        std::vector<double> sq;
        sq.reserve(samples.size());
        for (double x : samples) sq.push_back((x - m.value) * (x - m.value));
        m.std_error = std::sqrt(pairwise_sum(sq) / (count - 1.0)) / std::sqrt(count);
    }
    return m;
}

namespace {

double utility_ratio(double truthful, double best) {
    if (best <= 0.0) return truthful <= 0.0 ? 1.0 : truthful / best;
    return truthful / best;
}

Metric extreme(const std::string& name, const std::vector<double>& xs, bool want_max) {
    Metric m;
    m.name = name;
    m.samples = xs.size();
    if (!xs.empty()) m.value = want_max ? *std::max_element(xs.begin(), xs.end()) : *std::min_element(xs.begin(), xs.end());
    return m;
}

double indicator(bool b) { return b ? 1.0 : 0.0; }

// Per-instance samples; the layout is fixed per experiment kind.
std::vector<double> run_job(const ExperimentConfig& cfg, const GridCell& cell, std::size_t index) {
    const GenConfig gc = cell_gen_config(cfg, cell);
    const Instance inst = generate_instance(gc, index);
    switch (cfg.kind) {
    case ExperimentKind::CompareFirstAgent: {
        auto r = first_agent_ratios(inst);
        return {r.mbfs, r.mdfs};
    }
    case ExperimentKind::MpugCurve: return {mpug(inst, MechanismKind::MBFS, cfg.thresholds)};
    case ExperimentKind::PmaPmi: {
        std::vector<ManipulationSpec> specs;
        for (double t : cfg.thresholds) specs.push_back(TLevel{t});
        double share = pma(inst, MechanismKind::MBFS, specs);
        return {share, indicator(share > 0.0)};
    }
    case ExperimentKind::RandomizedVsDeterministic: {
        auto r = manipulability(inst, cfg.orders, cfg.mc_trials, derive_seed(gc.seed, {index, 1}));
        return {indicator(r.mbfs), indicator(r.mbfs_first_agent), indicator(r.mrbfs)};
    }
    }
    return {};
}

std::vector<Metric> reduce(ExperimentKind kind, const std::vector<std::vector<double>>& samples) {
    auto column = [&](std::size_t c) {
        std::vector<double> xs;
        xs.reserve(samples.size());
        for (const auto& s : samples) xs.push_back(s[c]);
        return xs;
    };
    auto losses = [](std::vector<double> xs) {
        for (double& x : xs) x = 1.0 - x;
        return xs;
    };
    switch (kind) {
    case ExperimentKind::CompareFirstAgent: {
        std::vector<Metric> out;
        const char* names[] = {"mbfs", "mdfs"};
        for (std::size_t c = 0; c < 2; ++c) {
            auto ratios = column(c);
            out.push_back(summarize(std::string(names[c]) + "_mean_ratio", ratios));
            out.push_back(extreme(std::string(names[c]) + "_max_loss", losses(ratios), true));
            out.push_back(extreme(std::string(names[c]) + "_min_loss", losses(ratios), false));
        }
        return out;
    }
    case ExperimentKind::MpugCurve: return {summarize("mpug", column(0))};
    case ExperimentKind::PmaPmi: return {summarize("pma", column(0)), summarize("pmi", column(1))};
    case ExperimentKind::RandomizedVsDeterministic:
        return {summarize("mbfs_manipulable", column(0)), summarize("mbfs_first_agent_manipulable", column(1)),
                summarize("mrbfs_manipulable", column(2))};
    }
    return {};
}

} // namespace

FirstAgentRatios first_agent_ratios(const Instance& inst) {
    FirstAgentRatios r;
    if (inst.num_agents() == 0 || inst.degree(0) == 0) return r;
    Profile best = Profile::truthful_agents(inst);
    best.agent_reports[0] = AgentReport{first_agent_best_report(inst), std::nullopt};
    auto ratio = [&](MechanismKind kind) {
        double truthful = agent_utility(inst, run_on_instance(kind, inst), 0);
        double top = agent_utility(inst, run_mechanism(kind, best), 0);
        return utility_ratio(truthful, top);
    };
    r.mbfs = ratio(MechanismKind::MBFS);
    r.mdfs = ratio(MechanismKind::MDFS);
    return r;
}

Manipulability manipulability(const Instance& inst, const std::vector<int>& orders, std::size_t mc_trials,
                              std::uint64_t mc_seed) {
    Manipulability out;
    auto base = std::make_shared<const Instance>(inst);

    std::vector<double> truthful = agent_utilities(inst, run_on_instance(MechanismKind::MBFS, inst));
    std::vector<ManipulationSpec> top{TopB{}};
    std::vector<ManipulationSpec> korder;
    for (int k : orders) korder.push_back(KOrder{k});
    if (inst.num_agents() > 0)
        out.mbfs_first_agent = agent_can_gain(inst, truthful, MechanismKind::MBFS, 0, top);
    out.mbfs = out.mbfs_first_agent;
    for (std::size_t a = 1; a < inst.num_agents() && !out.mbfs; ++a)
        out.mbfs = agent_can_gain(inst, truthful, MechanismKind::MBFS, static_cast<AgentId>(a), korder);

    auto honest = randomized_bfs_samples(Profile::truthful_agents(base), mc_trials, mc_seed);
    for (std::size_t i = 0; i < inst.num_agents() && !out.mrbfs; ++i) {
        const auto a = static_cast<AgentId>(i);
        if (inst.degree(a) == 0) continue;
        std::vector<AgentReport> tried;
        for (int k : orders) {
            AgentReport r = apply_manipulation(inst, a, KOrder{k});
            auto adj = inst.agent_tasks(a);
            if (std::equal(r.edges.begin(), r.edges.end(), adj.begin(), adj.end())) continue;
            if (std::find(tried.begin(), tried.end(), r) != tried.end()) continue;
            tried.push_back(r);

            Profile p = Profile::truthful_agents(base);
            p.agent_reports[i] = r;
            auto deviant = randomized_bfs_samples(p, mc_trials, mc_seed);
            std::vector<double> diff(mc_trials);
            for (std::size_t t = 0; t < mc_trials; ++t) diff[t] = deviant[i][t] - honest[i][t];
            Metric d = summarize("diff", diff);
            double guard = d.std_error ? 2.0 * *d.std_error : 0.0;
            if (d.value > guard + kTolerance) {
                out.mrbfs = true;
                break;
            }
        }
    }
    return out;
}

ResultsTable run_experiment(const ExperimentConfig& cfg, int workers) {
    validate_experiment_config(cfg);
    const auto cells = grid_cells(cfg);
    const std::size_t per_cell = cfg.iterations;
    auto samples = parallel_map(cells.size() * per_cell, workers, [&](std::size_t job) {
        return run_job(cfg, cells[job / per_cell], job % per_cell);
    });

    ResultsTable table;
    table.kind = cfg.kind;
    table.seed = cfg.seed;
    table.config = experiment_config_to_json(cfg);
    for (std::size_t c = 0; c < cells.size(); ++c) {
        std::vector<std::vector<double>> cell_samples(samples.begin() + static_cast<std::ptrdiff_t>(c * per_cell),
                                                      samples.begin() + static_cast<std::ptrdiff_t>((c + 1) * per_cell));
        ResultRow row;
        row.n = cells[c].n;
        row.m = cells[c].m;
        row.p = cells[c].p;
        row.b_low = cells[c].capacity.low;
        row.b_high = cells[c].capacity.high;
        row.iterations = per_cell;
        row.metrics = reduce(cfg.kind, cell_samples);
        table.rows.push_back(std::move(row));
    }
    return table;
}

namespace {

std::string fixed6(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", x);
    return buf;
}

} // namespace

std::string results_to_csv(const ResultsTable& table) {
    std::ostringstream os;
    os << "n,m,p,b_low,b_high,iterations,metric,value,stderr,seed\n";
    for (const auto& r : table.rows)
        for (const auto& m : r.metrics)
            os << r.n << ',' << r.m << ',' << fixed6(r.p) << ',' << r.b_low << ',' << r.b_high << ','
               << r.iterations << ',' << m.name << ',' << fixed6(m.value) << ','
               << (m.std_error ? fixed6(*m.std_error) : "") << ',' << table.seed << '\n';
    return os.str();
}

nlohmann::json results_to_json(const ResultsTable& table) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : table.rows) {
        nlohmann::json metrics = nlohmann::json::array();
        for (const auto& m : r.metrics)
            metrics.push_back({{"name", m.name},
                               {"value", m.value},
                               {"stderr", m.std_error ? nlohmann::json(*m.std_error) : nlohmann::json(nullptr)},
                               {"samples", m.samples}});
        rows.push_back({{"n", r.n},
                        {"m", r.m},
                        {"p", r.p},
                        {"b_low", r.b_low},
                        {"b_high", r.b_high},
                        {"iterations", r.iterations},
                        {"metrics", metrics}});
    }
    return {{"kind", to_string(table.kind)}, {"seed", table.seed}, {"config", table.config}, {"rows", rows}};
}

ResultsTable results_from_json(const nlohmann::json& j) {
    try {
        ResultsTable t;
        t.kind = experiment_from_string(j.at("kind").get<std::string>());
        t.seed = j.at("seed").get<std::uint64_t>();
        t.config = j.at("config");
        for (const auto& r : j.at("rows")) {
            ResultRow row;
            row.n = r.at("n").get<int>();
            row.m = r.at("m").get<int>();
            row.p = r.at("p").get<double>();
            row.b_low = r.at("b_low").get<int>();
            row.b_high = r.at("b_high").get<int>();
            row.iterations = r.at("iterations").get<std::size_t>();
            for (const auto& m : r.at("metrics")) {
                Metric metric;
                metric.name = m.at("name").get<std::string>();
                metric.value = m.at("value").get<double>();
                if (!m.at("stderr").is_null()) metric.std_error = m.at("stderr").get<double>();
                metric.samples = m.at("samples").get<std::size_t>();
                row.metrics.push_back(std::move(metric));
            }
            t.rows.push_back(std::move(row));
        }
        return t;
    } catch (const nlohmann::json::exception& ex) {
        throw Error(std::string("malformed results JSON: ") + ex.what());
    }
}

void export_results(const ResultsTable& table, ExportFormat format, const std::filesystem::path& path) {
    write_text_file(path, format == ExportFormat::Csv ? results_to_csv(table) : results_to_json(table).dump(2) + "\n");
}

namespace {

std::string coord(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

} // namespace

std::string render_plot_svg(const ResultsTable& table) {
    if (table.kind != ExperimentKind::MpugCurve) throw Error("plot: needs an mpug-curve table");

    std::map<int, std::map<int, double>> series; // n -> m -> mean mpug
    for (const auto& r : table.rows) {
        const Metric& mp = r.metric("mpug");
        if (mp.samples == 0) throw Error("plot: empty mpug metric");
        if (!series[r.n].emplace(r.m, mp.value).second)
            throw Error("plot: more than one row per (n, m)");
    }
    if (series.empty()) throw Error("plot: table has no rows");

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymax = 0.0;
    for (const auto& [n, pts] : series)
        for (const auto& [m, v] : pts) {
            xmin = std::min(xmin, static_cast<double>(m));
            xmax = std::max(xmax, static_cast<double>(m));
            if (std::isfinite(v)) ymax = std::max(ymax, v);
        }
    if (ymax <= 0.0) ymax = 1.0;

    const double width = 640, height = 400, left = 70, right = 120, top = 30, bottom = 60;
    const double pw = width - left - right, ph = height - top - bottom;
    auto px = [&](double m) { return xmax > xmin ? left + (m - xmin) / (xmax - xmin) * pw : left + pw / 2; };
    auto py = [&](double v) { return top + (1.0 - std::min(v, ymax) / ymax) * ph; };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<line x1=\"" << coord(left) << "\" y1=\"" << coord(top + ph) << "\" x2=\"" << coord(left + pw)
       << "\" y2=\"" << coord(top + ph) << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << coord(left) << "\" y1=\"" << coord(top) << "\" x2=\"" << coord(left)
       << "\" y2=\"" << coord(top + ph) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << coord(left + pw / 2) << "\" y=\"" << coord(height - 15)
       << "\" text-anchor=\"middle\" font-size=\"14\">number of tasks (m)</text>\n";
    os << "<text x=\"18\" y=\"" << coord(top + ph / 2) << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 18 "
       << coord(top + ph / 2) << ")\">mean MPUG</text>\n";
    for (int tick = 0; tick <= 4; ++tick) {
        double v = ymax * tick / 4.0;
        os << "<text x=\"" << coord(left - 6) << "\" y=\"" << coord(py(v) + 4) << "\" text-anchor=\"end\" font-size=\"11\">"
           << coord(v) << "</text>\n";
    }
    std::set<int> ms;
    for (const auto& [n, pts] : series)
        for (const auto& [m, v] : pts) ms.insert(m);
    for (int m : ms)
        os << "<text x=\"" << coord(px(m)) << "\" y=\"" << coord(top + ph + 18) << "\" text-anchor=\"middle\" font-size=\"11\">"
           << m << "</text>\n";

    std::size_t k = 0;
    for (const auto& [n, pts] : series) {
        const char* color = colors[k % std::size(colors)];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        bool first = true;
        for (const auto& [m, v] : pts) {
            os << (first ? "" : " ") << coord(px(m)) << ',' << coord(py(v));
            first = false;
        }
        os << "\"/>\n";
        os << "<text x=\"" << coord(left + pw + 10) << "\" y=\"" << coord(top + 16 + 18.0 * static_cast<double>(k))
           << "\" font-size=\"12\" fill=\"" << color << "\">n=" << n << "</text>\n";
        ++k;
    }
    os << "</svg>\n";
    return os.str();
}

void render_plot(const ResultsTable& table, const std::filesystem::path& path) {
    write_text_file(path, render_plot_svg(table));
}

} // namespace mvbm
