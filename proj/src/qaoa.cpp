#include "anastaars/qaoa.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace anastaars {

namespace {

constexpr int kMaxQubits = 24;

void validate_graph(const Graph& graph) {
    if (graph.n < 1) {
        throw std::invalid_argument("graph: vertex count must be >= 1");
    }
    if (graph.n > kMaxQubits) {
        throw std::invalid_argument(
            "graph: vertex count exceeds the statevector limit of 24");
    }
    std::set<std::pair<int, int>> seen;
    for (const Edge& e : graph.edges) {
        if (e.u < 0 || e.v >= graph.n || e.u >= e.v) {
            throw std::invalid_argument("graph: edge endpoints must satisfy 0 <= u < v < n");
        }
        if (!seen.insert({e.u, e.v}).second) {
            throw std::invalid_argument("graph: duplicate edge");
        }
    }
}

void apply_phase_layer(StateVector& state, const CutDiagonal& diag,
                       double gamma) {
    const std::size_t dim = state.amplitudes.size();
    for (std::size_t x = 0; x < dim; ++x) {
        state.amplitudes[x] *= std::polar(1.0, -gamma * diag.values[x]);
    }
}

void apply_mixer_layer(StateVector& state, double beta) {
    const std::size_t dim = state.amplitudes.size();
    const std::complex<double> c(std::cos(beta), 0.0);
    const std::complex<double> ms(0.0, -std::sin(beta));
    for (int qubit = 0; qubit < state.n; ++qubit) {
        const std::size_t stride = std::size_t{1} << qubit;
        for (std::size_t base = 0; base < dim; base += 2 * stride) {
            for (std::size_t off = 0; off < stride; ++off) {
                std::complex<double>& a0 = state.amplitudes[base + off];
                std::complex<double>& a1 = state.amplitudes[base + off + stride];
                const std::complex<double> b0 = c * a0 + ms * a1;
                const std::complex<double> b1 = ms * a0 + c * a1;
                a0 = b0;
                a1 = b1;
            }
        }
    }
}

StateVector prepare_with_diagonal(const CutDiagonal& diag,
                                  const QaoaAngles& angles) {
    if (angles.gamma.size() != angles.beta.size()) {
        throw std::invalid_argument("qaoa angles: gamma and beta lengths differ");
    }
    StateVector state;
    state.n = diag.n;
    const std::size_t dim = std::size_t{1} << diag.n;
    state.amplitudes.assign(dim, {1.0 / std::sqrt(static_cast<double>(dim)), 0.0});
    for (int layer = 0; layer < angles.p(); ++layer) {
        apply_phase_layer(state, diag, angles.gamma(layer));
        apply_mixer_layer(state, angles.beta(layer));
    }
    return state;
}

double state_norm2(const StateVector& state) {
    double total = 0.0;
    for (const auto& a : state.amplitudes) {
        total += std::norm(a);
    }
    return total;
}

// Inverse-CDF draw of `shots` basis indices; returns the mean diagonal value.
double sample_from_state(const StateVector& state, const CutDiagonal& diag,
                         int shots, Rng& rng, std::vector<double>* per_shot) {
    if (shots < 1) {
        throw std::invalid_argument("sample_shots: shots must be >= 1");
    }
    if (state.n != diag.n ||
        state.amplitudes.size() != diag.values.size()) {
        throw std::invalid_argument("sample_shots: state and diagonal disagree");
    }
    const double norm2 = state_norm2(state);
    if (std::abs(norm2 - 1.0) > 1e-10) {
        throw std::invalid_argument("sample_shots: state is not normalized");
    }

    std::vector<double> cdf(state.amplitudes.size());
    double acc = 0.0;
    for (std::size_t x = 0; x < cdf.size(); ++x) {
        acc += std::norm(state.amplitudes[x]);
        cdf[x] = acc;
    }

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double sum = 0.0;
    for (int b = 0; b < shots; ++b) {
        const double u = unit(rng) * acc;
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        const std::size_t idx =
            it == cdf.end() ? cdf.size() - 1
                            : static_cast<std::size_t>(it - cdf.begin());
        const double value = diag.values[idx];
        sum += value;
        if (per_shot != nullptr) {
            per_shot->push_back(value);
        }
    }
    return sum / static_cast<double>(shots);
}

} // namespace

Graph chvatal_graph() {
    Graph graph;
    graph.n = 12;
    const int pairs[24][2] = {
        {0, 1},  {0, 4},  {0, 6},  {0, 9},  {1, 2},  {1, 5},
        {1, 7},  {2, 3},  {2, 6},  {2, 8},  {3, 4},  {3, 7},
        {3, 9},  {4, 5},  {4, 8},  {5, 10}, {5, 11}, {6, 10},
        {6, 11}, {7, 8},  {7, 11}, {8, 10}, {9, 10}, {9, 11}};
    for (const auto& pr : pairs) {
        graph.edges.push_back({pr[0], pr[1], 1.0});
    }
    validate_graph(graph);
    return graph;
}

Graph cycle_graph(int n) {
    if (n < 3) {
        throw std::invalid_argument("cycle_graph: need n >= 3");
    }
    Graph graph;
    graph.n = n;
    for (int i = 0; i + 1 < n; ++i) {
        graph.edges.push_back({i, i + 1, 1.0});
    }
    graph.edges.push_back({0, n - 1, 1.0});
    validate_graph(graph);
    return graph;
}

Graph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("load_graph: cannot open " + path);
    }
    Graph graph;
    std::size_t edge_count = 0;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        std::istringstream row(line);
        if (!have_header) {
            if (!(row >> graph.n >> edge_count)) {
                continue;  // skip blank or comment-like leading lines
            }
            have_header = true;
            continue;
        }
        int u = 0, v = 0;
        double w = 1.0;
        if (!(row >> u >> v)) {
            continue;
        }
        row >> w;  // optional weight
        if (u > v) {
            std::swap(u, v);
        }
        graph.edges.push_back({u, v, w});
    }
    if (!have_header) {
        throw std::runtime_error("load_graph: missing 'n <count>' header in " +
                                 path);
    }
    if (graph.edges.size() != edge_count) {
        throw std::runtime_error("load_graph: header edge count mismatch in " +
                                 path);
    }
    validate_graph(graph);
    return graph;
}

QaoaAngles split_angles(const Eigen::VectorXd& x) {
    if (x.size() < 2 || x.size() % 2 != 0) {
        throw std::invalid_argument(
            "split_angles: parameter vector must have even length 2p");
    }
    const int p = static_cast<int>(x.size()) / 2;
    QaoaAngles angles;
    angles.gamma = x.head(p);
    angles.beta = x.tail(p);
    return angles;
}

double cut_value(const Graph& graph, std::uint32_t assignment) {
    double total = 0.0;
    for (const Edge& e : graph.edges) {
        const std::uint32_t bu = (assignment >> e.u) & 1u;
        const std::uint32_t bv = (assignment >> e.v) & 1u;
        if (bu != bv) {
            total += e.w;
        }
    }
    return total;
}

std::pair<double, std::uint32_t> brute_force_maxcut(const Graph& graph) {
    validate_graph(graph);
    // Complementary assignments cut identically, so fix the top vertex's side.
    const std::uint32_t half = std::uint32_t{1} << (graph.n - 1);
    double best = 0.0;
    std::uint32_t arg = 0;
    for (std::uint32_t x = 0; x < half; ++x) {
        const double value = cut_value(graph, x);
        if (value > best) {
            best = value;
            arg = x;
        }
    }
    return {best, arg};
}

CutDiagonal build_cut_diagonal(const Graph& graph) {
    validate_graph(graph);
    CutDiagonal diag;
    diag.n = graph.n;
    const std::size_t dim = std::size_t{1} << graph.n;
    diag.values.resize(dim);
    for (std::size_t x = 0; x < dim; ++x) {
        diag.values[x] = cut_value(graph, static_cast<std::uint32_t>(x));
    }
    return diag;
}

StateVector prepare_qaoa_state(const Graph& graph, const QaoaAngles& angles) {
    return prepare_with_diagonal(build_cut_diagonal(graph), angles);
}

double exact_expectation(const Graph& graph, const QaoaAngles& angles) {
    const CutDiagonal diag = build_cut_diagonal(graph);
    const StateVector state = prepare_with_diagonal(diag, angles);
    double total = 0.0;
    for (std::size_t x = 0; x < state.amplitudes.size(); ++x) {
        total += std::norm(state.amplitudes[x]) * diag.values[x];
    }
    return total;
}

double sample_shots(const StateVector& state, const CutDiagonal& diag,
                    int shots, Rng& rng) {
    return sample_from_state(state, diag, shots, rng, nullptr);
}

QaoaOracle::QaoaOracle(Graph graph, int p)
    : graph_(std::move(graph)), p_(p) {
    validate_graph(graph_);
    if (p_ < 1) {
        throw std::invalid_argument("QaoaOracle: need at least one layer");
    }
    diag_ = build_cut_diagonal(graph_);
}

double QaoaOracle::sample(const Eigen::VectorXd& x, Rng& rng) {
    std::vector<double> one;
    sample_batch(x, 1, rng, one);
    return one[0];
}

void QaoaOracle::sample_batch(const Eigen::VectorXd& x, int shots, Rng& rng,
                              std::vector<double>& out) {
    if (x.size() != dimension()) {
        throw std::invalid_argument("QaoaOracle: parameter size must be 2p");
    }
    const StateVector state = prepare_with_diagonal(diag_, split_angles(x));
    out.clear();
    out.reserve(static_cast<std::size_t>(shots));
    sample_from_state(state, diag_, shots, rng, &out);
    for (double& v : out) {
        v = -v;
    }
}

double QaoaOracle::true_value(const Eigen::VectorXd& x) const {
    if (x.size() != dimension()) {
        throw std::invalid_argument("QaoaOracle: parameter size must be 2p");
    }
    const StateVector state = prepare_with_diagonal(diag_, split_angles(x));
    double total = 0.0;
    for (std::size_t i = 0; i < state.amplitudes.size(); ++i) {
        total += std::norm(state.amplitudes[i]) * diag_.values[i];
    }
    return -total;
}

} // namespace anastaars
