#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "anastaars/models.hpp"
#include "anastaars/optimizer.hpp"
#include "anastaars/qaoa.hpp"
#include "anastaars/rng.hpp"

namespace anastaars {

/// One experiment sweep, read from a flat `key = value` spec file.
/// Lists are comma separated; unknown keys are rejected so typos surface.
struct ExperimentSpec {
    std::string graph = "cycle6";  // chvatal | cycle<N> | path to edge list
    std::vector<int> p_values{5};
    std::vector<int> shot_counts{100};            // B sweep
    std::vector<std::string> optimizers{"anastaars", "stars"};
    ModelKind model_kind = ModelKind::mfn;
    int trials = 30;
    long long budget = 0;         // absolute shots per trial; 0 = factor * B
    double budget_factor = 550.0;
    std::uint64_t base_seed = 0;
    std::string out_dir = "results";

    // Optimizer knobs; the noise coefficient differs per optimizer so the
    // baseline runs the classical ratio test by default.
    double gamma = 2.0;
    double eta1 = 0.01;
    double eta2 = 0.9;
    double delta0 = 1.0;
    double delta_max = 5.0;
    double r = 1.0;
    double stars_r = 0.0;
    int q0 = 2;
    int q_max = 0;                // 0 = full dimension 2p
};

/// One (graph, p, B, optimizer, trial) work item.
struct CellInfo {
    std::string name;
    std::uint64_t seed = 0;
    std::string csv_file;         // relative to the output directory
    int p = 0;
    int shots_per_estimate = 0;
    std::string optimizer;
    int trial = 0;
    long long budget = 0;
};

ExperimentSpec parse_spec(std::istream& in);
ExperimentSpec parse_spec_file(const std::string& path);

/// Resolves a graph source string: "chvatal", "cycle<N>", or a file path.
Graph make_graph(const std::string& source);

long long cell_budget(const ExperimentSpec& spec, int shots_per_estimate);

/// Deterministic enumeration of all cells with their derived seeds
/// (base_seed XOR a stable hash of the cell name).
std::vector<CellInfo> enumerate_cells(const ExperimentSpec& spec);

/// Per-trial trajectory CSV: a header row, an initial row at k = -1 holding
/// the starting point's true value, then one row per iteration.
void write_trajectory_csv(std::ostream& out, const RunResult& result,
                          double delta0, int q0);

/// The (cumulative shots, best true value so far) step function of one CSV.
struct TrajectoryCurve {
    std::vector<long long> shots;
    std::vector<double> best_true;
};

TrajectoryCurve read_trajectory_curve(const std::string& path);

/// Step-function value at `shot`: the best recorded value at or before it.
double curve_value_at(const TrajectoryCurve& curve, long long shot);

/// Evenly spaced cumulative-shot grid from 0 to budget, duplicates removed.
std::vector<long long> make_shot_grid(long long budget, int points);

/// Pointwise median and quartiles of several trials' step functions on a
/// common grid (last value carried forward within each trial).
struct AggregateCurve {
    std::vector<long long> grid;
    std::vector<double> median;
    std::vector<double> q25;
    std::vector<double> q75;
};

AggregateCurve aggregate_median(const std::vector<TrajectoryCurve>& trials,
                                const std::vector<long long>& grid);

/// One plotted line.
struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

/// Standalone SVG line chart, one polyline element per nonempty series.
/// Throws without writing when every series is empty.
void write_svg_plot(const std::string& path, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    const std::vector<PlotSeries>& series);

/// Runs every cell on a bounded worker pool (jobs <= 0 picks the hardware
/// count), writing one CSV per cell plus a manifest of all cells.
void run_experiment(const ExperimentSpec& spec, int jobs);

/// Reads the manifest in `dir` and writes one aggregated CSV per (p, B)
/// group: optimizer, shots, median, q25, q75, ratio_median.
void aggregate_directory(const std::string& dir);

/// Turns every aggregated CSV in `dir` into an SVG chart.
void plot_directory(const std::string& dir);

} // namespace anastaars
