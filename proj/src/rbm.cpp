#include "qdbn/rbm.hpp"

#include <bit>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "qdbn/errors.hpp"

namespace qdbn {

namespace {

void check_dims(const RbmParams& p, const char* who) {
    if (p.n_visible <= 0 || p.n_hidden <= 0)
        throw std::invalid_argument(std::string(who) + ": unit counts must be positive");
    if (p.weights.rows() != p.n_visible || p.weights.cols() != p.n_hidden ||
        p.visible_bias.size() != p.n_visible || p.hidden_bias.size() != p.n_hidden ||
        p.mask.rows() != p.n_visible || p.mask.cols() != p.n_hidden)
        throw std::invalid_argument(std::string(who) + ": inconsistent parameter shapes");
}

void check_enumeration_size(const RbmParams& p, int guard, const char* who) {
    if (p.n_visible + p.n_hidden > guard) {
        std::ostringstream os;
        os << who << ": n_visible + n_hidden = " << (p.n_visible + p.n_hidden)
           << " is too large for exact enumeration (guard " << guard << ")";
        throw std::invalid_argument(os.str());
    }
}

// Visits every joint configuration (v, h) exactly once in Gray-code order,
// calling visit(v_bits, h_bits, log_weight) with log_weight = b.v + c.h + v'Wh.
template <typename Visit>
void enumerate_joint(const RbmParams& p, Visit&& visit) {
    const int n = p.n_visible;
    const int m = p.n_hidden;
    std::vector<char> v_bits(n, 0), h_bits(m, 0);

    double ch = 0.0;                       // c.h for the current hidden block
    VectorXd t = p.visible_bias;           // per-visible field b_i + sum_j W_ij h_j
    const std::uint64_t h_states = std::uint64_t(1) << m;
    const std::uint64_t v_states = std::uint64_t(1) << n;

    for (std::uint64_t hs = 0;; ++hs) {
        std::fill(v_bits.begin(), v_bits.end(), 0);
        double log_w = ch;  // v = 0
        visit(v_bits, h_bits, log_w);
        for (std::uint64_t vs = 1; vs < v_states; ++vs) {
            const int i = std::countr_zero(vs);
            v_bits[i] ^= 1;
            log_w += v_bits[i] ? t[i] : -t[i];
            visit(v_bits, h_bits, log_w);
        }
        if (hs + 1 >= h_states) break;
        const int j = std::countr_zero(hs + 1);
        h_bits[j] ^= 1;
        const double sign = h_bits[j] ? 1.0 : -1.0;
        ch += sign * p.hidden_bias[j];
        t += sign * p.weights.col(j);
    }
}

double max_log_weight(const RbmParams& p) {
    double best = -std::numeric_limits<double>::infinity();
    enumerate_joint(p, [&](const std::vector<char>&, const std::vector<char>&, double lw) {
        if (lw > best) best = lw;
    });
    return best;
}

}  // namespace

void RbmParams::validate() const {
    check_dims(*this, "RbmParams");
    if (!weights.allFinite() || !visible_bias.allFinite() || !hidden_bias.allFinite())
        throw std::invalid_argument("RbmParams: non-finite parameter value");
    for (int i = 0; i < n_visible; ++i)
        for (int j = 0; j < n_hidden; ++j)
            if (mask(i, j) && weights(i, j) != 0.0)
                throw std::invalid_argument("RbmParams: masked weight is nonzero");
}

void RbmParams::zero_masked_weights() {
    weights = mask.select(0.0, weights.array()).matrix();
}

double energy(const RbmParams& p, const VectorXd& v, const VectorXd& h) {
    check_dims(p, "energy");
    if (v.size() != p.n_visible || h.size() != p.n_hidden)
        throw std::invalid_argument("energy: state dimension mismatch");
    return -p.visible_bias.dot(v) - p.hidden_bias.dot(h) - v.dot(p.weights * h);
}

VectorXd hidden_conditional(const RbmParams& p, const VectorXd& v) {
    check_dims(p, "hidden_conditional");
    if (v.size() != p.n_visible)
        throw std::invalid_argument("hidden_conditional: visible dimension mismatch");
    VectorXd a = p.hidden_bias + p.weights.transpose() * v;
    return a.unaryExpr([](double x) { return sigmoid(x); });
}

VectorXd visible_conditional(const RbmParams& p, const VectorXd& h) {
    check_dims(p, "visible_conditional");
    if (h.size() != p.n_hidden)
        throw std::invalid_argument("visible_conditional: hidden dimension mismatch");
    VectorXd a = p.visible_bias + p.weights * h;
    return a.unaryExpr([](double x) { return sigmoid(x); });
}

double log_partition_function(const RbmParams& p, int guard) {
    check_dims(p, "log_partition_function");
    check_enumeration_size(p, guard, "log_partition_function");
    const double shift = max_log_weight(p);
    double sum = 0.0;
    enumerate_joint(p, [&](const std::vector<char>&, const std::vector<char>&, double lw) {
        sum += std::exp(lw - shift);
    });
    return shift + std::log(sum);
}

namespace {

// Marginalized enumeration: walk all states of one layer in Gray-code order,
// with the other layer summed out analytically. Calls visit(state_bits,
// conditional_means, log_weight) for every state of the enumerated layer.
template <typename F>
void enumerate_layer(const VectorXd& bias_enum, const VectorXd& bias_cond,
                     const MatrixXd& w_enum_by_cond, F&& visit) {
    const int k = static_cast<int>(bias_enum.size());
    std::vector<char> state(k, 0);
    VectorXd u = bias_cond;  // conditional field given the all-zero state

    auto log_weight = [&] {
        double lw = 0.0;
        for (int i = 0; i < k; ++i)
            if (state[i]) lw += bias_enum[i];
        for (Eigen::Index j = 0; j < u.size(); ++j) lw += softplus(u[j]);
        return lw;
    };

    visit(state, u, log_weight());
    const std::uint64_t total = std::uint64_t{1} << k;
    for (std::uint64_t step = 1; step < total; ++step) {
        const int bit = std::countr_zero(step);
        state[bit] ^= 1;
        if (state[bit])
            u += w_enum_by_cond.row(bit).transpose();
        else
            u -= w_enum_by_cond.row(bit).transpose();
        visit(state, u, log_weight());
    }
}

}  // namespace

ExpectationSet exact_expectations(const RbmParams& p, int guard) {
    check_dims(p, "exact_expectations");
    check_enumeration_size(p, guard, "exact_expectations");
    const int n = p.n_visible;
    const int m = p.n_hidden;
    const bool enum_visible = n <= m;
    const int k = enum_visible ? n : m;

    const VectorXd& bias_enum = enum_visible ? p.visible_bias : p.hidden_bias;
    const VectorXd& bias_cond = enum_visible ? p.hidden_bias : p.visible_bias;
    const MatrixXd w = enum_visible ? p.weights : MatrixXd(p.weights.transpose());

    // pass 1: log-domain normalizer with max shift
    double max_lw = -std::numeric_limits<double>::infinity();
    enumerate_layer(bias_enum, bias_cond, w,
                    [&](const std::vector<char>&, const VectorXd&, double lw) {
                        max_lw = std::max(max_lw, lw);
                    });

    ExpectationSet acc_enum(k, static_cast<int>(bias_cond.size()));
    double z = 0.0;
    enumerate_layer(
        bias_enum, bias_cond, w,
        [&](const std::vector<char>& s, const VectorXd& u, double lw) {
            const double weight = std::exp(lw - max_lw);
            z += weight;
            const VectorXd cond = u.unaryExpr([](double x) { return sigmoid(x); });
            acc_enum.h += weight * cond;
            for (int i = 0; i < k; ++i) {
                if (!s[i]) continue;
                acc_enum.v[i] += weight;
                acc_enum.vh.row(i) += weight * cond.transpose();
            }
        });

    ExpectationSet e(n, m);
    if (enum_visible) {
        e.v = acc_enum.v / z;
        e.h = acc_enum.h / z;
        e.vh = acc_enum.vh / z;
    } else {
        e.v = acc_enum.h / z;
        e.h = acc_enum.v / z;
        e.vh = acc_enum.vh.transpose() / z;
    }
    return e;
}

ExpectationSet clamped_expectations(const RbmParams& p, const MatrixXd& batch) {
    check_dims(p, "clamped_expectations");
    if (batch.rows() == 0) throw std::invalid_argument("clamped_expectations: empty batch");
    if (batch.cols() != p.n_visible)
        throw std::invalid_argument("clamped_expectations: batch width mismatch");

    const double rows = static_cast<double>(batch.rows());
    MatrixXd act = (batch * p.weights).rowwise() + p.hidden_bias.transpose();
    MatrixXd ph = act.unaryExpr([](double x) { return sigmoid(x); });

    ExpectationSet e(p.n_visible, p.n_hidden);
    e.v = batch.colwise().mean();
    e.h = ph.colwise().mean();
    e.vh = batch.transpose() * ph / rows;
    return e;
}

ExpectationSet cd_expectations(const RbmParams& p, const MatrixXd& batch, Rng& rng) {
    check_dims(p, "cd_expectations");
    if (batch.rows() == 0) throw std::invalid_argument("cd_expectations: empty batch");
    if (batch.cols() != p.n_visible)
        throw std::invalid_argument("cd_expectations: batch width mismatch");

    const Eigen::Index rows = batch.rows();
    MatrixXd ph0 = ((batch * p.weights).rowwise() + p.hidden_bias.transpose())
                       .unaryExpr([](double x) { return sigmoid(x); });
    MatrixXd h0(rows, p.n_hidden);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (int j = 0; j < p.n_hidden; ++j)
            h0(r, j) = bernoulli(rng, ph0(r, j)) ? 1.0 : 0.0;

    MatrixXd v1 = ((h0 * p.weights.transpose()).rowwise() + p.visible_bias.transpose())
                      .unaryExpr([](double x) { return sigmoid(x); });
    MatrixXd h1 = ((v1 * p.weights).rowwise() + p.hidden_bias.transpose())
                      .unaryExpr([](double x) { return sigmoid(x); });

    ExpectationSet e(p.n_visible, p.n_hidden);
    e.v = v1.colwise().mean();
    e.h = h1.colwise().mean();
    e.vh = v1.transpose() * h1 / static_cast<double>(rows);
    return e;
}

void apply_update(RbmParams& p, UpdateState& st, const ExpectationSet& data,
                  const ExpectationSet& model) {
    check_dims(p, "apply_update");
    auto bad = [](const ExpectationSet& e) {
        return !e.vh.allFinite() || !e.v.allFinite() || !e.h.allFinite();
    };
    if (bad(data)) throw NumericalError("apply_update: NaN/Inf in data expectations");
    if (bad(model)) throw NumericalError("apply_update: NaN/Inf in model expectations");
    if (data.vh.rows() != p.n_visible || data.vh.cols() != p.n_hidden ||
        model.vh.rows() != p.n_visible || model.vh.cols() != p.n_hidden)
        throw std::invalid_argument("apply_update: expectation shape mismatch");

    st.w_buf = st.momentum * st.w_buf + st.learning_rate * (data.vh - model.vh);
    st.b_buf = st.momentum * st.b_buf + st.learning_rate * (data.v - model.v);
    st.c_buf = st.momentum * st.c_buf + st.learning_rate * (data.h - model.h);
    st.w_buf = p.mask.select(0.0, st.w_buf.array()).matrix();

    p.weights += st.w_buf;
    p.visible_bias += st.b_buf;
    p.hidden_bias += st.c_buf;
    p.zero_masked_weights();
}

double log_likelihood(const RbmParams& p, const MatrixXd& batch, int guard) {
    check_dims(p, "log_likelihood");
    if (batch.rows() == 0) throw std::invalid_argument("log_likelihood: empty batch");
    if (batch.cols() != p.n_visible)
        throw std::invalid_argument("log_likelihood: batch width mismatch");
    const double log_z = log_partition_function(p, guard);

    double total = 0.0;
    for (Eigen::Index r = 0; r < batch.rows(); ++r) {
        const VectorXd v = batch.row(r).transpose();
        double s = p.visible_bias.dot(v);
        VectorXd a = p.hidden_bias + p.weights.transpose() * v;
        for (int j = 0; j < p.n_hidden; ++j) s += softplus(a[j]);
        total += s - log_z;
    }
    return total / static_cast<double>(batch.rows());
}

RbmParams random_rbm(int n, int m, Rng& rng, double weight_sd) {
    RbmParams p(n, m);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) p.weights(i, j) = gaussian(rng, 0.0, weight_sd);
    return p;
}

RbmParams transposed(const RbmParams& p) {
    RbmParams t(p.n_hidden, p.n_visible);
    t.weights = p.weights.transpose();
    t.visible_bias = p.hidden_bias;
    t.hidden_bias = p.visible_bias;
    t.mask = p.mask.transpose();
    return t;
}

}  // namespace qdbn
