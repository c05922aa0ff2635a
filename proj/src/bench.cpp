#include "anastaars/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace fs = std::filesystem;

namespace anastaars {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

std::string fmt_coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return std::string(buf);
}

std::string fmt_tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return std::string(buf);
}

std::string trim(const std::string& s) {
    const std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) {
        out.push_back(item);
    }
    return out;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    for (const auto& item : split(s, ',')) {
        const std::string t = trim(item);
        if (!t.empty()) {
            out.push_back(t);
        }
    }
    return out;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
    throw std::runtime_error("experiment spec: bad value for '" + key +
                             "': " + value);
}

int parse_int(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        const int x = std::stoi(v, &pos);
        if (pos != v.size()) bad_value(key, v);
        return x;
    } catch (const std::runtime_error&) {
        throw;
    } catch (...) {
        bad_value(key, v);
    }
}

long long parse_ll(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        const long long x = std::stoll(v, &pos);
        if (pos != v.size()) bad_value(key, v);
        return x;
    } catch (const std::runtime_error&) {
        throw;
    } catch (...) {
        bad_value(key, v);
    }
}

std::uint64_t parse_u64(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        const std::uint64_t x = std::stoull(v, &pos);
        if (pos != v.size()) bad_value(key, v);
        return x;
    } catch (const std::runtime_error&) {
        throw;
    } catch (...) {
        bad_value(key, v);
    }
}

double parse_double(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) bad_value(key, v);
        return x;
    } catch (const std::runtime_error&) {
        throw;
    } catch (...) {
        bad_value(key, v);
    }
}

std::vector<int> parse_int_list(const std::string& v, const std::string& key) {
    std::vector<int> out;
    for (const auto& item : split_list(v)) {
        out.push_back(parse_int(item, key));
    }
    if (out.empty()) bad_value(key, v);
    return out;
}

std::string sanitize_token(const std::string& s) {
    std::string t;
    for (char c : s) {
        t.push_back(std::isalnum(static_cast<unsigned char>(c)) ? c : '-');
    }
    return t;
}

void validate_spec(const ExperimentSpec& spec) {
    if (spec.trials < 1) {
        throw std::runtime_error("experiment spec: trials must be >= 1");
    }
    if (spec.p_values.empty() || spec.shot_counts.empty() ||
        spec.optimizers.empty()) {
        throw std::runtime_error(
            "experiment spec: p, shots and optimizers must be nonempty");
    }
    for (int p : spec.p_values) {
        if (p < 1) throw std::runtime_error("experiment spec: every p must be >= 1");
    }
    for (int b : spec.shot_counts) {
        if (b < 1) throw std::runtime_error("experiment spec: every B must be >= 1");
    }
    std::set<std::string> seen;
    for (const auto& opt : spec.optimizers) {
        if (opt != "anastaars" && opt != "stars") {
            throw std::runtime_error("experiment spec: unknown optimizer '" +
                                     opt + "'");
        }
        if (!seen.insert(opt).second) {
            throw std::runtime_error("experiment spec: duplicate optimizer '" +
                                     opt + "'");
        }
    }
    if (spec.budget < 0) {
        throw std::runtime_error("experiment spec: budget must be >= 0");
    }
    if (spec.budget == 0 && !(spec.budget_factor > 0.0)) {
        throw std::runtime_error(
            "experiment spec: budget_factor must be > 0 when budget is 0");
    }
}

std::string agg_file_name(const std::string& token, int p, int B) {
    return "agg_" + token + "_p" + std::to_string(p) + "_B" +
           std::to_string(B) + ".csv";
}

struct Manifest {
    std::map<std::string, std::string> scalars;
    std::vector<CellInfo> cells;
};

Manifest read_manifest(const fs::path& dir) {
    const fs::path path = dir / "manifest.txt";
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot read " + path.string());
    }
    Manifest man;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key != "cell") {
            man.scalars[key] = value;
            continue;
        }
        CellInfo cell;
        for (const auto& tok : split(value, ' ')) {
            const std::size_t e2 = tok.find('=');
            if (e2 == std::string::npos) continue;
            const std::string k = tok.substr(0, e2);
            const std::string v = tok.substr(e2 + 1);
            if (k == "name") cell.name = v;
            else if (k == "seed") cell.seed = parse_u64(v, "cell seed");
            else if (k == "file") cell.csv_file = v;
            else if (k == "p") cell.p = parse_int(v, "cell p");
            else if (k == "B") cell.shots_per_estimate = parse_int(v, "cell B");
            else if (k == "optimizer") cell.optimizer = v;
            else if (k == "trial") cell.trial = parse_int(v, "cell trial");
            else if (k == "budget") cell.budget = parse_ll(v, "cell budget");
        }
        man.cells.push_back(std::move(cell));
    }
    return man;
}

void run_cell(const ExperimentSpec& spec, const Graph& graph,
              const CellInfo& cell) {
    QaoaOracle oracle(graph, cell.p);
    const int d = oracle.dimension();

    OptimizerConfig config;
    config.gamma = spec.gamma;
    config.eta1 = spec.eta1;
    config.eta2 = spec.eta2;
    config.delta0 = spec.delta0;
    config.delta_max = spec.delta_max;
    config.r = cell.optimizer == "stars" ? spec.stars_r : spec.r;
    config.q0 = spec.q0;
    config.q_max = spec.q_max > 0 ? std::min(spec.q_max, d) : d;
    config.model_kind = spec.model_kind;
    config.shots_per_estimate = cell.shots_per_estimate;
    config.max_evaluations = cell.budget;
    config.seed = cell.seed;

    Rng rng(cell.seed);
    std::uniform_real_distribution<double> box(-1.0, 1.0);
    Eigen::VectorXd x0(d);
    for (int i = 0; i < d; ++i) {
        x0(i) = box(rng);
    }

    const RunResult result = cell.optimizer == "stars"
                                 ? run_stars(config, oracle, x0, rng)
                                 : run_anastaars(config, oracle, x0, rng);

    const fs::path path = fs::path(spec.out_dir) / cell.csv_file;
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    write_trajectory_csv(out, result, config.delta0, config.q0);
}

void write_manifest(const ExperimentSpec& spec, const Graph& graph,
                    const std::vector<CellInfo>& cells) {
    const fs::path path = fs::path(spec.out_dir) / "manifest.txt";
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << "graph = " << spec.graph << "\n";
    out << "graph_token = " << sanitize_token(spec.graph) << "\n";
    out << "model = " << to_string(spec.model_kind) << "\n";
    out << "trials = " << spec.trials << "\n";
    out << "base_seed = " << spec.base_seed << "\n";
    out << "x0_box = uniform on [-1, 1]^(2p)\n";
    out << "maxcut = " << fmt_double(brute_force_maxcut(graph).first) << "\n";
    for (const auto& c : cells) {
        out << "cell = name=" << c.name << " seed=" << c.seed << " file="
            << c.csv_file << " p=" << c.p << " B=" << c.shots_per_estimate
            << " optimizer=" << c.optimizer << " trial=" << c.trial
            << " budget=" << c.budget << "\n";
    }
}

} // namespace

ExperimentSpec parse_spec(std::istream& in) {
    ExperimentSpec spec;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("experiment spec line " +
                                     std::to_string(lineno) +
                                     ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "graph") spec.graph = value;
        else if (key == "p") spec.p_values = parse_int_list(value, key);
        else if (key == "shots") spec.shot_counts = parse_int_list(value, key);
        else if (key == "optimizers") spec.optimizers = split_list(value);
        else if (key == "model") spec.model_kind = model_kind_from_string(value);
        else if (key == "trials") spec.trials = parse_int(value, key);
        else if (key == "budget") spec.budget = parse_ll(value, key);
        else if (key == "budget_factor") spec.budget_factor = parse_double(value, key);
        else if (key == "seed") spec.base_seed = parse_u64(value, key);
        else if (key == "out") spec.out_dir = value;
        else if (key == "gamma") spec.gamma = parse_double(value, key);
        else if (key == "eta1") spec.eta1 = parse_double(value, key);
        else if (key == "eta2") spec.eta2 = parse_double(value, key);
        else if (key == "delta0") spec.delta0 = parse_double(value, key);
        else if (key == "delta_max") spec.delta_max = parse_double(value, key);
        else if (key == "r") spec.r = parse_double(value, key);
        else if (key == "stars_r") spec.stars_r = parse_double(value, key);
        else if (key == "q0") spec.q0 = parse_int(value, key);
        else if (key == "q_max") spec.q_max = parse_int(value, key);
        else {
            throw std::runtime_error("experiment spec line " +
                                     std::to_string(lineno) +
                                     ": unknown key '" + key + "'");
        }
    }
    return spec;
}

ExperimentSpec parse_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot read experiment spec " + path);
    }
    return parse_spec(in);
}

Graph make_graph(const std::string& source) {
    if (source == "chvatal") {
        return chvatal_graph();
    }
    if (source.rfind("cycle", 0) == 0) {
        const std::string tail = source.substr(5);
        if (!tail.empty() &&
            std::all_of(tail.begin(), tail.end(), [](unsigned char c) {
                return std::isdigit(c);
            })) {
            return cycle_graph(parse_int(tail, "graph"));
        }
    }
    return load_graph(source);
}

long long cell_budget(const ExperimentSpec& spec, int shots_per_estimate) {
    if (spec.budget > 0) {
        return spec.budget;
    }
    return std::llround(spec.budget_factor *
                        static_cast<double>(shots_per_estimate));
}

std::vector<CellInfo> enumerate_cells(const ExperimentSpec& spec) {
    validate_spec(spec);
    const std::string token = sanitize_token(spec.graph);
    std::vector<CellInfo> cells;
    for (int p : spec.p_values) {
        for (int B : spec.shot_counts) {
            for (const auto& opt : spec.optimizers) {
                for (int trial = 0; trial < spec.trials; ++trial) {
                    CellInfo cell;
                    cell.name = token + "_p" + std::to_string(p) + "_B" +
                                std::to_string(B) + "_" + opt + "_t" +
                                std::to_string(trial);
                    cell.seed = spec.base_seed ^ fnv1a64(cell.name);
                    cell.csv_file = cell.name + ".csv";
                    cell.p = p;
                    cell.shots_per_estimate = B;
                    cell.optimizer = opt;
                    cell.trial = trial;
                    cell.budget = cell_budget(spec, B);
                    cells.push_back(std::move(cell));
                }
            }
        }
    }
    return cells;
}

void write_trajectory_csv(std::ostream& out, const RunResult& result,
                          double delta0, int q0) {
    out << "k,q,success,rho_tilde,delta,noise_estimate,shots_cumulative,"
           "estimate_f0,true_value,best_true_so_far\n";
    double best = result.initial_true_value;
    out << "-1," << q0 << ",0,nan," << fmt_double(delta0) << ",nan,0,nan,"
        << fmt_double(result.initial_true_value) << ',' << fmt_double(best)
        << "\n";
    for (const auto& rec : result.records) {
        best = std::min(best, rec.incumbent_true_value);
        out << rec.k << ',' << rec.q << ',' << (rec.success ? 1 : 0) << ','
            << fmt_double(rec.rho_tilde) << ',' << fmt_double(rec.delta) << ','
            << fmt_double(rec.noise_estimate) << ',' << rec.shots_cumulative
            << ',' << fmt_double(rec.f0_estimate) << ','
            << fmt_double(rec.incumbent_true_value) << ',' << fmt_double(best)
            << "\n";
    }
}

TrajectoryCurve read_trajectory_curve(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot read trajectory " + path);
    }
    std::string header;
    if (!std::getline(in, header)) {
        throw std::runtime_error("empty trajectory " + path);
    }
    const auto cols = split(trim(header), ',');
    int shots_col = -1;
    int best_col = -1;
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (cols[i] == "shots_cumulative") shots_col = static_cast<int>(i);
        if (cols[i] == "best_true_so_far") best_col = static_cast<int>(i);
    }
    if (shots_col < 0 || best_col < 0) {
        throw std::runtime_error("trajectory " + path +
                                 ": missing required columns");
    }
    TrajectoryCurve curve;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty()) continue;
        const auto fields = split(line, ',');
        if (static_cast<int>(fields.size()) <= std::max(shots_col, best_col)) {
            throw std::runtime_error("trajectory " + path + ": short row");
        }
        curve.shots.push_back(
            parse_ll(fields[static_cast<std::size_t>(shots_col)], "shots"));
        curve.best_true.push_back(std::strtod(
            fields[static_cast<std::size_t>(best_col)].c_str(), nullptr));
    }
    if (curve.shots.empty()) {
        throw std::runtime_error("trajectory " + path + ": no data rows");
    }
    return curve;
}

double curve_value_at(const TrajectoryCurve& curve, long long shot) {
    const auto it =
        std::upper_bound(curve.shots.begin(), curve.shots.end(), shot);
    if (it == curve.shots.begin()) {
        return curve.best_true.front();
    }
    return curve.best_true[static_cast<std::size_t>(it - curve.shots.begin()) -
                           1];
}

std::vector<long long> make_shot_grid(long long budget, int points) {
    if (budget < 0 || points < 2) {
        throw std::invalid_argument("make_shot_grid: need budget >= 0, points >= 2");
    }
    std::vector<long long> grid;
    for (int i = 0; i < points; ++i) {
        const long long g = std::llround(static_cast<double>(budget) * i /
                                         (points - 1));
        if (grid.empty() || g != grid.back()) {
            grid.push_back(g);
        }
    }
    return grid;
}

AggregateCurve aggregate_median(const std::vector<TrajectoryCurve>& trials,
                                const std::vector<long long>& grid) {
    if (trials.empty()) {
        throw std::invalid_argument("aggregate_median: no trials");
    }
    const auto quantile = [](std::vector<double>& v, double q) {
        std::sort(v.begin(), v.end());
        const double pos = q * static_cast<double>(v.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(pos);
        const std::size_t hi = std::min(lo + 1, v.size() - 1);
        const double frac = pos - static_cast<double>(lo);
        return v[lo] * (1.0 - frac) + v[hi] * frac;
    };

    AggregateCurve agg;
    agg.grid = grid;
    agg.median.reserve(grid.size());
    agg.q25.reserve(grid.size());
    agg.q75.reserve(grid.size());
    std::vector<double> values(trials.size());
    for (long long g : grid) {
        for (std::size_t t = 0; t < trials.size(); ++t) {
            values[t] = curve_value_at(trials[t], g);
        }
        std::vector<double> sorted = values;
        agg.q25.push_back(quantile(sorted, 0.25));
        agg.median.push_back(quantile(sorted, 0.5));
        agg.q75.push_back(quantile(sorted, 0.75));
    }
    return agg;
}

void write_svg_plot(const std::string& path, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    const std::vector<PlotSeries>& series) {
    std::vector<const PlotSeries*> kept;
    for (const auto& s : series) {
        if (!s.x.empty() && s.x.size() == s.y.size()) {
            kept.push_back(&s);
        }
    }
    if (kept.empty()) {
        throw std::invalid_argument("write_svg_plot: every series is empty");
    }

    double xmin = std::numeric_limits<double>::infinity();
    double xmax = -xmin;
    double ymin = xmin;
    double ymax = -xmin;
    for (const auto* s : kept) {
        for (double v : s->x) {
            xmin = std::min(xmin, v);
            xmax = std::max(xmax, v);
        }
        for (double v : s->y) {
            ymin = std::min(ymin, v);
            ymax = std::max(ymax, v);
        }
    }
    if (xmax <= xmin) xmax = xmin + 1.0;
    if (ymax <= ymin) {
        const double pad = std::max(1.0, std::abs(ymin)) * 0.05;
        ymin -= pad;
        ymax += pad;
    }

    const double width = 800.0, height = 500.0;
    const double ml = 80.0, mr = 30.0, mt = 45.0, mb = 60.0;
    const double pw = width - ml - mr;
    const double ph = height - mt - mb;
    const auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
    const auto py = [&](double y) { return mt + (ymax - y) / (ymax - ymin) * ph; };

    static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c",
                                    "#9467bd", "#ff7f0e", "#8c564b"};
    constexpr std::size_t kNumColors = sizeof(kColors) / sizeof(kColors[0]);

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
        << height << "\">\n"
        << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\""
        << height << "\" fill=\"white\"/>\n"
        << "<text x=\"" << width / 2 << "\" y=\"24\" font-family=\"sans-serif\""
        << " font-size=\"16\" text-anchor=\"middle\">" << title << "</text>\n";

    // axes
    svg << "<line x1=\"" << fmt_coord(ml) << "\" y1=\"" << fmt_coord(mt + ph)
        << "\" x2=\"" << fmt_coord(ml + pw) << "\" y2=\"" << fmt_coord(mt + ph)
        << "\" stroke=\"black\"/>\n"
        << "<line x1=\"" << fmt_coord(ml) << "\" y1=\"" << fmt_coord(mt)
        << "\" x2=\"" << fmt_coord(ml) << "\" y2=\"" << fmt_coord(mt + ph)
        << "\" stroke=\"black\"/>\n";

    for (int i = 0; i <= 4; ++i) {
        const double xv = xmin + (xmax - xmin) * i / 4.0;
        const double yv = ymin + (ymax - ymin) * i / 4.0;
        const double tx = px(xv);
        const double ty = py(yv);
        svg << "<line x1=\"" << fmt_coord(tx) << "\" y1=\"" << fmt_coord(mt + ph)
            << "\" x2=\"" << fmt_coord(tx) << "\" y2=\""
            << fmt_coord(mt + ph + 5) << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << fmt_coord(tx) << "\" y=\""
            << fmt_coord(mt + ph + 20)
            << "\" font-family=\"sans-serif\" font-size=\"11\""
            << " text-anchor=\"middle\">" << fmt_tick(xv) << "</text>\n"
            << "<line x1=\"" << fmt_coord(ml - 5) << "\" y1=\"" << fmt_coord(ty)
            << "\" x2=\"" << fmt_coord(ml) << "\" y2=\"" << fmt_coord(ty)
            << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << fmt_coord(ml - 9) << "\" y=\""
            << fmt_coord(ty + 4)
            << "\" font-family=\"sans-serif\" font-size=\"11\""
            << " text-anchor=\"end\">" << fmt_tick(yv) << "</text>\n";
    }

    svg << "<text x=\"" << fmt_coord(ml + pw / 2) << "\" y=\""
        << fmt_coord(height - 14)
        << "\" font-family=\"sans-serif\" font-size=\"13\""
        << " text-anchor=\"middle\">" << x_label << "</text>\n"
        << "<text x=\"18\" y=\"" << fmt_coord(mt + ph / 2)
        << "\" font-family=\"sans-serif\" font-size=\"13\""
        << " text-anchor=\"middle\" transform=\"rotate(-90 18 "
        << fmt_coord(mt + ph / 2) << ")\">" << y_label << "</text>\n";

    for (std::size_t i = 0; i < kept.size(); ++i) {
        svg << "<polyline fill=\"none\" stroke=\"" << kColors[i % kNumColors]
            << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t j = 0; j < kept[i]->x.size(); ++j) {
            if (j > 0) svg << ' ';
            svg << fmt_coord(px(kept[i]->x[j])) << ','
                << fmt_coord(py(kept[i]->y[j]));
        }
        svg << "\"/>\n";
    }

    for (std::size_t i = 0; i < kept.size(); ++i) {
        const double ly = mt + 16.0 + 18.0 * static_cast<double>(i);
        svg << "<line x1=\"" << fmt_coord(ml + pw - 150) << "\" y1=\""
            << fmt_coord(ly) << "\" x2=\"" << fmt_coord(ml + pw - 120)
            << "\" y2=\"" << fmt_coord(ly) << "\" stroke=\""
            << kColors[i % kNumColors] << "\" stroke-width=\"2\"/>\n"
            << "<text x=\"" << fmt_coord(ml + pw - 114) << "\" y=\""
            << fmt_coord(ly + 4)
            << "\" font-family=\"sans-serif\" font-size=\"12\">"
            << kept[i]->label << "</text>\n";
    }
    svg << "</svg>\n";

    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path);
    }
    out << svg.str();
}

void run_experiment(const ExperimentSpec& spec, int jobs) {
    const Graph graph = make_graph(spec.graph);
    const std::vector<CellInfo> cells = enumerate_cells(spec);
    fs::create_directories(spec.out_dir);

    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    int workers = jobs > 0 ? jobs : static_cast<int>(hw);
    workers = std::min<int>(workers, static_cast<int>(cells.size()));
    workers = std::max(workers, 1);

    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;

    const auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (first_error) return;
            }
            try {
                run_cell(spec, graph, cells[i]);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) {
                    first_error = std::current_exception();
                }
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int i = 0; i < workers; ++i) {
        pool.emplace_back(worker);
    }
    for (auto& t : pool) {
        t.join();
    }
    if (first_error) {
        std::rethrow_exception(first_error);
    }
    write_manifest(spec, graph, cells);
}

void aggregate_directory(const std::string& dir) {
    const Manifest man = read_manifest(dir);
    if (man.cells.empty()) {
        throw std::runtime_error("manifest in " + dir + " lists no cells");
    }
    const auto tok_it = man.scalars.find("graph_token");
    const std::string token =
        tok_it != man.scalars.end() ? tok_it->second : std::string("graph");
    double maxcut = 0.0;
    const auto mc_it = man.scalars.find("maxcut");
    if (mc_it != man.scalars.end()) {
        maxcut = std::strtod(mc_it->second.c_str(), nullptr);
    }

    std::map<std::pair<int, int>, std::vector<const CellInfo*>> groups;
    for (const auto& cell : man.cells) {
        groups[{cell.p, cell.shots_per_estimate}].push_back(&cell);
    }

    for (const auto& [key, members] : groups) {
        const auto [p, B] = key;
        const long long budget = members.front()->budget;
        const std::vector<long long> grid = make_shot_grid(budget, 200);

        std::vector<std::string> optimizer_order;
        std::map<std::string, std::vector<TrajectoryCurve>> curves;
        for (const CellInfo* cell : members) {
            if (curves.find(cell->optimizer) == curves.end()) {
                optimizer_order.push_back(cell->optimizer);
            }
            curves[cell->optimizer].push_back(read_trajectory_curve(
                (fs::path(dir) / cell->csv_file).string()));
        }

        const fs::path out_path = fs::path(dir) / agg_file_name(token, p, B);
        std::ofstream out(out_path);
        if (!out) {
            throw std::runtime_error("cannot write " + out_path.string());
        }
        out << "optimizer,shots,median,q25,q75,ratio_median\n";
        for (const auto& opt : optimizer_order) {
            const AggregateCurve agg = aggregate_median(curves[opt], grid);
            for (std::size_t i = 0; i < agg.grid.size(); ++i) {
                const double ratio =
                    maxcut > 0.0
                        ? -agg.median[i] / maxcut
                        : std::numeric_limits<double>::quiet_NaN();
                out << opt << ',' << agg.grid[i] << ','
                    << fmt_double(agg.median[i]) << ',' << fmt_double(agg.q25[i])
                    << ',' << fmt_double(agg.q75[i]) << ',' << fmt_double(ratio)
                    << "\n";
            }
        }
    }
}

void plot_directory(const std::string& dir) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("agg_", 0) == 0 &&
            entry.path().extension() == ".csv") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        throw std::runtime_error("no aggregated CSVs found in " + dir);
    }

    for (const auto& file : files) {
        std::ifstream in(file);
        if (!in) {
            throw std::runtime_error("cannot read " + file.string());
        }
        std::string header;
        std::getline(in, header);
        const auto cols = split(trim(header), ',');
        int opt_col = -1, shots_col = -1, median_col = -1;
        for (std::size_t i = 0; i < cols.size(); ++i) {
            if (cols[i] == "optimizer") opt_col = static_cast<int>(i);
            if (cols[i] == "shots") shots_col = static_cast<int>(i);
            if (cols[i] == "median") median_col = static_cast<int>(i);
        }
        if (opt_col < 0 || shots_col < 0 || median_col < 0) {
            throw std::runtime_error(file.string() + ": missing columns");
        }

        std::vector<std::string> order;
        std::map<std::string, PlotSeries> by_optimizer;
        std::string line;
        while (std::getline(in, line)) {
            line = trim(line);
            if (line.empty()) continue;
            const auto fields = split(line, ',');
            const std::string& opt = fields[static_cast<std::size_t>(opt_col)];
            auto it = by_optimizer.find(opt);
            if (it == by_optimizer.end()) {
                order.push_back(opt);
                it = by_optimizer.emplace(opt, PlotSeries{opt, {}, {}}).first;
            }
            it->second.x.push_back(std::strtod(
                fields[static_cast<std::size_t>(shots_col)].c_str(), nullptr));
            it->second.y.push_back(std::strtod(
                fields[static_cast<std::size_t>(median_col)].c_str(), nullptr));
        }

        std::vector<PlotSeries> series;
        for (const auto& opt : order) {
            series.push_back(by_optimizer[opt]);
        }
        const std::string stem = file.stem().string().substr(4);
        const fs::path out_path = fs::path(dir) / ("plot_" + stem + ".svg");
        write_svg_plot(out_path.string(), stem, "cumulative shots",
                       "best objective so far", series);
    }
}

} // namespace anastaars
