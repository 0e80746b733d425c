#include "cosmo/condnet/net.hpp"

#include <cmath>
#include <string>

#include "cosmo/error.hpp"

namespace cosmo::condnet {

namespace {

MatrixXd tanh_of(const MatrixXd& m) { return m.array().tanh().matrix(); }

MatrixXd tanh_grad(const MatrixXd& upstream, const MatrixXd& activated) {
    return (upstream.array() * (1.0 - activated.array().square())).matrix();
}

} // namespace

ConditionedNet::ConditionedNet(NetShape shape, Vocabulary vocab, TimeNormalizer exec, TimeNormalizer remaining,
                               std::uint64_t seed)
    : shape_(shape), vocab_(std::move(vocab)), exec_(exec), remaining_(remaining) {
    if (shape_.vocab == 0) shape_.vocab = vocab_.size();
    if (shape_.vocab != vocab_.size()) throw ValidationError("shape vocabulary size differs from vocabulary");
    if (shape_.layers == 0 || shape_.hidden == 0 || shape_.d_in() == 0)
        throw ValidationError("layers, hidden size and input width must be positive");
    params_ = Parameters::random(shape_, seed);
}

ConditionedNet::ConditionedNet(NetShape shape, Vocabulary vocab, TimeNormalizer exec, TimeNormalizer remaining,
                               Parameters params)
    : shape_(shape), vocab_(std::move(vocab)), exec_(exec), remaining_(remaining), params_(std::move(params)) {
    if (shape_.vocab != vocab_.size()) throw CheckpointError("shape vocabulary size differs from vocabulary");
    auto expected = Parameters::zeros(shape_);
    std::vector<std::pair<Eigen::Index, Eigen::Index>> dims;
    expected.for_each([&](const std::string&, const MatrixXd& t) { dims.emplace_back(t.rows(), t.cols()); });
    std::size_t i = 0;
    bool ok = params_.layers.size() == shape_.layers;
    if (ok)
        params_.for_each([&](const std::string& name, const MatrixXd& t) {
            if (i >= dims.size() || dims[i] != std::pair(t.rows(), t.cols()))
                throw CheckpointError("tensor " + name + " has the wrong shape");
            ++i;
        });
    if (!ok || i != dims.size()) throw CheckpointError("parameter layout does not match the network shape");
}

MatrixXd ConditionedNet::encode_step(std::span<const int> tokens, const Eigen::RowVectorXd& exec_norm) const {
    auto B = static_cast<Eigen::Index>(tokens.size());
    auto de = static_cast<Eigen::Index>(shape_.d_emb);
    auto dt = static_cast<Eigen::Index>(shape_.d_time);
    MatrixXd x(de + dt, B);
    for (Eigen::Index j = 0; j < B; ++j) x.col(j).head(de) = params_.embedding.col(tokens[static_cast<std::size_t>(j)]);
    x.bottomRows(dt) = params_.time_proj * exec_norm;
    x.bottomRows(dt).colwise() += params_.time_bias.col(0);
    return x;
}

ForwardCache ConditionedNet::forward(const Batch& batch) const {
    if (static_cast<std::size_t>(batch.condition.rows()) != shape_.m)
        throw ValidationError("condition length " + std::to_string(batch.condition.rows()) + " but the net expects " +
                              std::to_string(shape_.m));
    const std::size_t T = batch.steps;
    const auto B = static_cast<Eigen::Index>(batch.size);
    ForwardCache c;
    c.layers.resize(shape_.layers);
    for (std::size_t t = 0; t < T; ++t) {
        auto first = batch.inputs.begin() + static_cast<std::ptrdiff_t>(t * batch.size);
        std::vector<int> toks(first, first + B);
        c.layers[0].x.push_back(encode_step(toks, batch.input_times.row(static_cast<Eigen::Index>(t))));
    }
    for (std::size_t l = 0; l < shape_.layers; ++l) {
        const auto& p = params_.layers[l];
        auto& a = c.layers[l];
        MatrixXd cond_bias = p.Q * batch.condition;
        cond_bias.colwise() += p.b_h.col(0);
        MatrixXd h_prev = MatrixXd::Zero(p.W.rows(), B);
        for (std::size_t t = 0; t < T; ++t) {
            MatrixXd h = tanh_of(p.U * a.x[t] + p.W * h_prev + cond_bias);
            if (!h.allFinite())
                throw RuntimeFailure("non-finite activation at layer " + std::to_string(l) + ", step " +
                                     std::to_string(t));
            MatrixXd pre = p.V * h;
            pre.colwise() += p.b_y.col(0);
            MatrixXd o = tanh_of(pre);
            a.y.push_back(o + a.x[t]);
            a.o.push_back(std::move(o));
            h_prev = h;
            a.h.push_back(std::move(h));
        }
        if (l + 1 < shape_.layers) c.layers[l + 1].x = a.y;
    }
    for (std::size_t t = 0; t < T; ++t) {
        MatrixXd pre = params_.head_w1 * c.layers.back().y[t];
        pre.colwise() += params_.head_b1.col(0);
        MatrixXd z = tanh_of(pre);
        MatrixXd logits = params_.head_wa * z;
        logits.colwise() += params_.head_ba.col(0);
        MatrixXd time = params_.head_wt * z;
        time.array() += params_.head_bt(0, 0);
        c.z.push_back(std::move(z));
        c.logits.push_back(std::move(logits));
        c.time.push_back(std::move(time));
    }
    return c;
}

LossResult ConditionedNet::score(const ForwardCache& cache, const Batch& batch, const LossOptions& opt,
                                 std::vector<MatrixXd>* d_logits, std::vector<MatrixXd>* d_time) const {
    LossResult r;
    double ce_sum = 0.0;
    double se_sum = 0.0;
    for (std::size_t t = 0; t < batch.steps; ++t)
        for (std::size_t j = 0; j < batch.size; ++j)
            r.steps += batch.mask(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)) > 0.0;
    if (r.steps == 0) throw ValidationError("every step of the batch is masked");
    const double weight = opt.reduction == Reduction::Mean ? 1.0 / static_cast<double>(r.steps) : 1.0;
    const auto B = static_cast<Eigen::Index>(batch.size);
    for (std::size_t t = 0; t < batch.steps; ++t) {
        const auto Ti = static_cast<Eigen::Index>(t);
        const MatrixXd& logits = cache.logits[t];
        MatrixXd dl;
        MatrixXd dt;
        if (d_logits) {
            dl = MatrixXd::Zero(logits.rows(), B);
            dt = MatrixXd::Zero(1, B);
        }
        for (Eigen::Index j = 0; j < B; ++j) {
            if (batch.mask(Ti, j) <= 0.0) continue;
            int target = batch.target(t, static_cast<std::size_t>(j));
            Eigen::Index best = 0;
            double mx = logits.col(j).maxCoeff(&best);
            VectorXd e = (logits.col(j).array() - mx).exp().matrix();
            double z = e.sum();
            ce_sum += std::log(z) + mx - logits(target, j);
            r.correct += best == target;
            double diff = cache.time[t](0, j) - batch.target_times(Ti, j);
            se_sum += diff * diff;
            if (d_logits) {
                dl.col(j) = e / z * weight;
                dl(target, j) -= weight;
                dt(0, j) = weight * opt.lambda_time * 2.0 * diff;
            }
        }
        if (d_logits) {
            d_logits->push_back(std::move(dl));
            d_time->push_back(std::move(dt));
        }
    }
    const auto n = static_cast<double>(r.steps);
    r.ce = ce_sum / n;
    r.mse = se_sum / n;
    r.loss = (ce_sum + opt.lambda_time * se_sum) * weight;
    return r;
}

LossResult ConditionedNet::loss(const Batch& batch, const LossOptions& opt) const {
    return score(forward(batch), batch, opt, nullptr, nullptr);
}

LossResult ConditionedNet::gradient(const Batch& batch, const LossOptions& opt, Parameters& g) const {
    ForwardCache c = forward(batch);
    std::vector<MatrixXd> d_logits, d_time;
    LossResult r = score(c, batch, opt, &d_logits, &d_time);
    g = Parameters::zeros(shape_);
    const std::size_t T = batch.steps;

    std::vector<MatrixXd> dy(T);
    for (std::size_t t = 0; t < T; ++t) {
        const MatrixXd& z = c.z[t];
        g.head_wa.noalias() += d_logits[t] * z.transpose();
        g.head_ba += d_logits[t].rowwise().sum();
        g.head_wt.noalias() += d_time[t] * z.transpose();
        g.head_bt(0, 0) += d_time[t].sum();
        MatrixXd dz = params_.head_wa.transpose() * d_logits[t] + params_.head_wt.transpose() * d_time[t];
        MatrixXd dpre = tanh_grad(dz, z);
        g.head_w1.noalias() += dpre * c.layers.back().y[t].transpose();
        g.head_b1 += dpre.rowwise().sum();
        dy[t] = params_.head_w1.transpose() * dpre;
    }

    for (std::size_t l = shape_.layers; l-- > 0;) {
        const auto& p = params_.layers[l];
        auto& gp = g.layers[l];
        const auto& a = c.layers[l];
        std::vector<MatrixXd> dx(T);
        MatrixXd dh_next = MatrixXd::Zero(p.W.rows(), static_cast<Eigen::Index>(batch.size));
        MatrixXd dcond = MatrixXd::Zero(p.W.rows(), static_cast<Eigen::Index>(batch.size));
        for (std::size_t t = T; t-- > 0;) {
            MatrixXd dpre_o = tanh_grad(dy[t], a.o[t]);
            gp.V.noalias() += dpre_o * a.h[t].transpose();
            gp.b_y += dpre_o.rowwise().sum();
            MatrixXd dh = p.V.transpose() * dpre_o + dh_next;
            MatrixXd da = tanh_grad(dh, a.h[t]);
            gp.U.noalias() += da * a.x[t].transpose();
            if (t > 0) gp.W.noalias() += da * a.h[t - 1].transpose();
            dcond += da;
            dx[t] = p.U.transpose() * da + dy[t];
            dh_next = p.W.transpose() * da;
        }
        gp.Q.noalias() += dcond * batch.condition.transpose();
        gp.b_h += dcond.rowwise().sum();
        dy = std::move(dx);
    }

    const auto de = static_cast<Eigen::Index>(shape_.d_emb);
    const auto dt = static_cast<Eigen::Index>(shape_.d_time);
    for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t j = 0; j < batch.size; ++j)
            g.embedding.col(batch.input(t, j)) += dy[t].col(static_cast<Eigen::Index>(j)).head(de);
        auto dtime = dy[t].bottomRows(dt);
        g.time_proj.noalias() += dtime * batch.input_times.row(static_cast<Eigen::Index>(t)).transpose();
        g.time_bias += dtime.rowwise().sum();
    }
    return r;
}

ConditionedNet::State ConditionedNet::start() const {
    State s;
    for (const auto& p : params_.layers) s.h.push_back(VectorXd::Zero(p.W.rows()));
    return s;
}

ConditionedNet::StepOutput ConditionedNet::step(State& state, int token, double exec_norm,
                                                const VectorXd& condition) const {
    if (static_cast<std::size_t>(condition.size()) != shape_.m)
        throw ValidationError("condition length " + std::to_string(condition.size()) + " but the net expects " +
                              std::to_string(shape_.m));
    const int toks[1] = {token};
    Eigen::RowVectorXd times(1);
    times(0) = exec_norm;
    VectorXd x = encode_step(toks, times);
    for (std::size_t l = 0; l < shape_.layers; ++l) {
        const auto& p = params_.layers[l];
        VectorXd h = (p.U * x + p.W * state.h[l] + p.Q * condition + p.b_h.col(0)).array().tanh().matrix();
        if (!h.allFinite()) throw RuntimeFailure("non-finite activation at layer " + std::to_string(l));
        x = (p.V * h + p.b_y.col(0)).array().tanh().matrix() + x;
        state.h[l] = std::move(h);
    }
    VectorXd z = (params_.head_w1 * x + params_.head_b1.col(0)).array().tanh().matrix();
    StepOutput out;
    out.logits = params_.head_wa * z + params_.head_ba.col(0);
    out.time = params_.head_wt.row(0).dot(z) + params_.head_bt(0, 0);
    return out;
}

} // namespace cosmo::condnet
