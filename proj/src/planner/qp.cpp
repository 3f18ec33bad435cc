#include "planner/qp.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace ccplan {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Constraint i of the combined list, written as n_i' z >= b_i.
// Rows of G come first, then finite lower bounds, then finite upper bounds.
struct Constraints
{
    const QpProblem& qp;
    std::vector<Index> lower, upper;

    Index size() const { return qp.h.size() + static_cast<Index>(lower.size() + upper.size()); }

    double slack(Index i, const VectorXd& z) const
    {
        const Index m = qp.h.size();
        if (i < m)
            return qp.h(i) - qp.G.row(i).dot(z);
        i -= m;
        if (i < static_cast<Index>(lower.size()))
            return z(lower[i]) - qp.lb(lower[i]);
        i -= static_cast<Index>(lower.size());
        return qp.ub(upper[i]) - z(upper[i]);
    }

    // J' n_i without forming n_i.
    void project(Index i, const MatrixXd& j, VectorXd& d) const
    {
        const Index m = qp.h.size();
        if (i < m) {
            d.noalias() = -(j.transpose() * qp.G.row(i).transpose());
            return;
        }
        i -= m;
        if (i < static_cast<Index>(lower.size())) {
            d = j.row(lower[i]).transpose();
            return;
        }
        i -= static_cast<Index>(lower.size());
        d = -j.row(upper[i]).transpose();
    }

    double normal_dot(Index i, const VectorXd& v) const
    {
        const Index m = qp.h.size();
        if (i < m)
            return -qp.G.row(i).dot(v);
        i -= m;
        if (i < static_cast<Index>(lower.size()))
            return v(lower[i]);
        i -= static_cast<Index>(lower.size());
        return -v(upper[i]);
    }
};

class ActiveSet
{
public:
    explicit ActiveSet(MatrixXd j) : j_(std::move(j)), r_(MatrixXd::Zero(j_.rows(), j_.rows())) {}

    Index size() const { return q_; }
    const MatrixXd& j() const { return j_; }

    // Step directions for a constraint with J' n = d: primal z and dual r.
    void directions(const VectorXd& d, VectorXd& z, VectorXd& r) const
    {
        const Index n = j_.rows();
        z.noalias() = j_.rightCols(n - q_) * d.tail(n - q_);
        r = r_.topLeftCorner(q_, q_).triangularView<Eigen::Upper>().solve(d.head(q_));
    }

    // Appends a constraint whose projection is d; false if it is dependent.
    bool add(VectorXd d)
    {
        const Index n = j_.rows();
        for (Index k = n - 1; k > q_; --k) {
            double cc = d(k - 1), ss = d(k);
            const double h = std::hypot(cc, ss);
            if (h == 0.0)
                continue;
            d(k) = 0.0;
            ss /= h;
            cc /= h;
            if (cc < 0.0) {
                cc = -cc;
                ss = -ss;
                d(k - 1) = -h;
            } else {
                d(k - 1) = h;
            }
            const double xny = ss / (1.0 + cc);
            for (Index i = 0; i < n; ++i) {
                const double t1 = j_(i, k - 1), t2 = j_(i, k);
                j_(i, k - 1) = t1 * cc + t2 * ss;
                j_(i, k) = xny * (t1 + j_(i, k - 1)) - t2;
            }
        }
        r_.col(q_).head(q_ + 1) = d.head(q_ + 1);
        ++q_;
        const double diag = std::fabs(d(q_ - 1));
        r_norm_ = std::max(r_norm_, diag);
        return diag > std::numeric_limits<double>::epsilon() * r_norm_;
    }

    // Removes the constraint at active position l.
    void remove(Index l)
    {
        const Index n = j_.rows();
        for (Index k = l; k + 1 < q_; ++k)
            r_.col(k) = r_.col(k + 1);
        r_.col(q_ - 1).setZero();
        --q_;
        for (Index k = l; k < q_; ++k) {
            double cc = r_(k, k), ss = r_(k + 1, k);
            const double h = std::hypot(cc, ss);
            if (h == 0.0)
                continue;
            cc /= h;
            ss /= h;
            r_(k + 1, k) = 0.0;
            if (cc < 0.0) {
                r_(k, k) = -h;
                cc = -cc;
                ss = -ss;
            } else {
                r_(k, k) = h;
            }
            const double xny = ss / (1.0 + cc);
            for (Index i = k + 1; i < q_; ++i) {
                const double t1 = r_(k, i), t2 = r_(k + 1, i);
                r_(k, i) = t1 * cc + t2 * ss;
                r_(k + 1, i) = xny * (t1 + r_(k, i)) - t2;
            }
            for (Index i = 0; i < n; ++i) {
                const double t1 = j_(i, k), t2 = j_(i, k + 1);
                j_(i, k) = t1 * cc + t2 * ss;
                j_(i, k + 1) = xny * (j_(i, k) + t1) - t2;
            }
        }
    }

private:
    MatrixXd j_;
    MatrixXd r_;
    Index q_ = 0;
    double r_norm_ = 1.0;
};

}  // namespace

QpResult solve_qp(const QpProblem& qp, const QpOptions& opts)
{
    const Index n = qp.c.size();
    Constraints cons{qp, {}, {}};
    for (Index i = 0; i < n; ++i) {
        if (std::isfinite(qp.lb(i)))
            cons.lower.push_back(i);
        if (std::isfinite(qp.ub(i)))
            cons.upper.push_back(i);
    }
    const Index m_all = cons.size();

    QpResult res;
    res.lambda = VectorXd::Zero(qp.h.size());
    Eigen::LLT<MatrixXd> llt(qp.H);
    if (llt.info() != Eigen::Success) {
        res.z = VectorXd::Zero(n);
        return res;
    }
    // J = L^-T so that J J' = H^-1.
    MatrixXd linv = llt.matrixL().solve(MatrixXd::Identity(n, n));
    ActiveSet as(linv.transpose());
    VectorXd z = -llt.solve(qp.c);

    std::vector<Index> active;  // constraint indices by active position
    std::vector<double> u;      // their multipliers
    std::vector<char> is_active(static_cast<std::size_t>(m_all), 0);

    double scale = 1.0;
    for (Index i = 0; i < qp.h.size(); ++i)
        scale = std::max(scale, std::fabs(qp.h(i)));
    const double feas_tol = opts.tol * scale;
    const int max_iter = opts.max_iter > 0 ? opts.max_iter : static_cast<int>(10 * (n + m_all));

    VectorXd d(n), step(n), r;
    res.status = QpStatus::IterationLimit;
    for (int it = 0; it < max_iter; ++it) {
        res.iterations = it + 1;
        // Most violated inactive constraint.
        Index p = -1;
        double worst = -feas_tol;
        for (Index i = 0; i < m_all; ++i) {
            if (is_active[i])
                continue;
            const double s = cons.slack(i, z);
            if (s < worst) {
                worst = s;
                p = i;
            }
        }
        if (p < 0) {
            res.status = QpStatus::Solved;
            break;
        }
        if (!z.allFinite()) {
            res.status = QpStatus::NumericalFailure;
            break;
        }

        double u_plus = 0.0;
        bool added = false;
        int inner = 0;
        while (!added) {
            if (++inner > max_iter) {
                res.status = QpStatus::IterationLimit;
                break;
            }
            cons.project(p, as.j(), d);
            as.directions(d, step, r);
            const double slack_p = cons.slack(p, z);
            // Partial (dual) step limit from active multipliers.
            double t1 = kInf;
            Index l = -1;
            for (Index k = 0; k < as.size(); ++k) {
                if (r(k) > 0.0) {
                    const double ratio = u[k] / r(k);
                    if (ratio < t1) {
                        t1 = ratio;
                        l = k;
                    }
                }
            }
            // Full (primal) step.
            const double zn = cons.normal_dot(p, step);
            double t2 = kInf;
            if (std::fabs(zn) > 1e-14 * (1.0 + step.norm()))
                t2 = -slack_p / zn;
            if (t2 < 0.0)
                t2 = kInf;
            const double t = std::min(t1, t2);
            if (!std::isfinite(t)) {
                res.status = QpStatus::Infeasible;
                break;
            }
            if (!std::isfinite(t2)) {
                for (Index k = 0; k < as.size(); ++k)
                    u[k] -= t * r(k);
                u_plus += t;
                is_active[active[l]] = 0;
                active.erase(active.begin() + l);
                u.erase(u.begin() + l);
                as.remove(l);
                continue;
            }
            z += t * step;
            for (Index k = 0; k < as.size(); ++k)
                u[k] -= t * r(k);
            u_plus += t;
            if (t == t2) {
                if (!as.add(d)) {
                    // Numerically dependent: undo the append and treat as infeasible.
                    as.remove(as.size() - 1);
                    res.status = QpStatus::Infeasible;
                    break;
                }
                active.push_back(p);
                u.push_back(u_plus);
                is_active[p] = 1;
                added = true;
            } else {
                is_active[active[l]] = 0;
                active.erase(active.begin() + l);
                u.erase(u.begin() + l);
                as.remove(l);
            }
        }
        if (!added)
            break;
    }
    res.z = z;
    for (std::size_t k = 0; k < active.size(); ++k)
        if (active[k] < qp.h.size())
            res.lambda(active[k]) = u[k];
    return res;
}

}  // namespace ccplan
