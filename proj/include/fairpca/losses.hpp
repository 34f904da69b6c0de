#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <string>
#include <vector>

#include "fairpca/ingest.hpp"
#include "fairpca/spectra.hpp"

namespace fairpca {

struct FairProjection;  // rounding.hpp

// Per-group sufficient statistics. Every loss downstream is a linear
// functional of the Gram matrix, so the raw rows are never revisited; the
// spectrum is taken once, eagerly, and best-rank-d energies are memoized as
// prefix sums. Immutable after construction.
class GroupStats {
  public:
    GroupStats(std::string label, const Eigen::MatrixXd& rows);
    static GroupStats from_gram(std::string label, Eigen::MatrixXd gram_matrix, int m);

    const std::string& label() const { return label_; }
    int m() const { return m_; }
    int n() const { return static_cast<int>(gram_.rows()); }
    const Eigen::MatrixXd& gram() const { return gram_; }
    double total_energy() const { return total_; }   // ||A||_F^2 = tr(gram)
    double best_energy_at(int d) const;               // sum of top-d eigenvalues

  private:
    GroupStats() = default;
    void finish();  // fills total_ and prefix_

    std::string label_;
    int m_ = 0;
    Eigen::MatrixXd gram_;
    double total_ = 0.0;
    std::vector<double> prefix_;  // prefix_[d] = best_energy_at(d), prefix_[0] = 0
};

std::vector<GroupStats> group_stats(const GroupedDataset& ds);

struct LossReport {
    std::string method;  // "vanilla" | "fair"
    int d = 0;
    struct Entry {
        std::string group;
        double avg_error = 0.0;
        double avg_loss = 0.0;
    };
    std::vector<Entry> per_group;
    // False when the MW solve behind a fair report hit its iteration cap.
    bool converged = true;

    double max_avg_loss() const;
};

// ||Y - Z||_F^2. UsageError on shape mismatch.
double reconstruction_error(const Eigen::MatrixXd& Y, const Eigen::MatrixXd& Z);

// loss(A, A V V^T) = ||A_hat||_F^2 - <A^T A, V V^T> for orthonormal V (n x d).
// Raw (not averaged) value. UsageError if V is not orthonormal within 1e-8.
double loss_projection(const GroupStats& stats, const Eigen::MatrixXd& V, int d);

// loss(A, A P*) = ||A_hat||_F^2 - sum_j (2 c_j - c_j^2) <A^T A, u_j u_j^T>
// for P* = sum_j c_j u_j u_j^T with orthonormal basis columns u_j and
// coefficients c_j in (0, 1]. Equals loss_projection when all c_j = 1.
double loss_affine(const GroupStats& stats, const Eigen::MatrixXd& basis,
                   const Eigen::VectorXd& coeffs, int d);

// Per-group average error and average loss of the rank-d projection V V^T
// (vanilla) or of a FairProjection. Values are reported in user coordinates:
// when enforce_width scaled the rows by s, everything is divided by s^2.
LossReport audit(const GroupedDataset& ds, int d, const Eigen::MatrixXd& V);
LossReport audit(const GroupedDataset& ds, int d, const FairProjection& proj);

// CSV rows: method,d,group,avg_error,avg_loss (one header line first).
void write_report_csv(std::ostream& out, const std::vector<LossReport>& reports);
std::string report_csv(const std::vector<LossReport>& reports);

}  // namespace fairpca
