#pragma once

#include <Eigen/Core>
#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "anastaars/oracle.hpp"
#include "anastaars/rng.hpp"

namespace anastaars {

struct Edge {
    int u = 0;
    int v = 0;
    double w = 1.0;
};

/// Undirected weighted graph, vertices 0..n-1, each edge stored once with
/// u < v.  Kept small enough (n <= 24) for exact statevector work.
struct Graph {
    int n = 0;
    std::vector<Edge> edges;
};

struct QaoaAngles {
    Eigen::VectorXd gamma;
    Eigen::VectorXd beta;
    int p() const { return static_cast<int>(gamma.size()); }
};

/// Basis index x encodes qubit i in bit i.
struct StateVector {
    int n = 0;
    std::vector<std::complex<double>> amplitudes;
};

/// Diagonal of the problem Hamiltonian: values[x] is the cut weight of the
/// partition encoded by bitstring x.
struct CutDiagonal {
    int n = 0;
    std::vector<double> values;
};

/// The standard 12-vertex, 24-edge, 4-regular, triangle-free graph with unit
/// weights; its maximum cut weighs 20.
Graph chvatal_graph();

/// Unit-weight n-cycle, n >= 3.
Graph cycle_graph(int n);

/// Plain-text edge list: header line "n <edge count>", then one "u v w" per
/// line (w optional, default 1).
Graph load_graph(const std::string& path);

/// Splits the optimizer's parameter vector (gamma_1..gamma_p, beta_1..beta_p)
/// into angle pairs.
QaoaAngles split_angles(const Eigen::VectorXd& x);

/// Total weight of edges crossing the partition encoded by bitstring
/// `assignment` (bit b gives spin 1 - 2b).
double cut_value(const Graph& graph, std::uint32_t assignment);

/// Exact maximum cut over all bipartitions; returns (value, assignment).
std::pair<double, std::uint32_t> brute_force_maxcut(const Graph& graph);

CutDiagonal build_cut_diagonal(const Graph& graph);

/// Applies p alternating phase and mixer layers to the uniform
/// superposition.  The phase layer multiplies amplitude x by
/// exp(-i gamma * values[x]); the mixer applies
/// [[cos b, -i sin b], [-i sin b, cos b]] on every qubit.
StateVector prepare_qaoa_state(const Graph& graph, const QaoaAngles& angles);

/// <psi| H_P |psi> = sum_x |psi_x|^2 values[x].
double exact_expectation(const Graph& graph, const QaoaAngles& angles);

/// Mean of values[x] over B basis indices drawn from |psi_x|^2 by
/// inverse-CDF sampling.
double sample_shots(const StateVector& state, const CutDiagonal& diag,
                    int shots, Rng& rng);

/// Shot-noise objective over R^{2p}: minimizing it maximizes the expected
/// cut, because every value is negated.  A batch prepares the circuit state
/// once and draws all its shots from that one preparation.
class QaoaOracle final : public StochasticOracle {
public:
    QaoaOracle(Graph graph, int p);

    int dimension() const override { return 2 * p_; }
    double sample(const Eigen::VectorXd& x, Rng& rng) override;
    void sample_batch(const Eigen::VectorXd& x, int shots, Rng& rng,
                      std::vector<double>& out) override;
    double true_value(const Eigen::VectorXd& x) const override;

    const Graph& graph() const { return graph_; }

private:
    Graph graph_;
    int p_;
    CutDiagonal diag_;
};

} // namespace anastaars
