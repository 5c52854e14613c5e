#include "tbp/scanner.hpp"

#include "tbp/errors.hpp"
#include "tbp/taylor.hpp"

#include <json.hpp>

#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace tbp {

namespace {

using nlohmann::json;

constexpr double kRefineTol = 1e-12; // time tolerance of the sub-step search

// Tracks the best endpoint minimum of P(t) over t > 1 and keeps copies of the
// two step records bracketing it, so refinement never needs a full trace.
class BracketTracker {
public:
    BracketTracker(const State12 &u0) : u0_(u0) {}

    void on_step(const StepRecord &rec)
    {
        if (want_right_ && rec.t_start == best_t_) {
            right_ = rec;
            have_right_ = true;
            want_right_ = false;
        }
        BigReal t_end = rec.t_start + rec.h;
        if (t_end <= 1) {
            return;
        }
        State12 u = dense_eval(rec, rec.h);
        BigReal p = proximity(u, u0_);
        if (!have_ || p < best_p_) {
            have_ = true;
            best_p_ = p;
            best_t_ = t_end;
            left_ = rec;
            have_right_ = false;
            want_right_ = true;
        }
    }

    ReturnProx refine(const BigReal &t0) const
    {
        if (!have_) {
            throw std::logic_error("BracketTracker: no endpoint past t = 1");
        }
        BigReal lo = left_.t_start;
        BigReal lo_clip = BigReal(1) + BigReal("1e-12");
        if (lo < lo_clip) {
            lo = lo_clip;
        }
        BigReal hi = have_right_ ? right_.t_start + right_.h : best_t_;
        if (hi > t0) {
            hi = t0;
        }

        auto eval = [&](const BigReal &t) {
            const StepRecord &r = (have_right_ && t > best_t_) ? right_ : left_;
            return proximity(dense_eval(r, t - r.t_start), u0_);
        };

        // Golden-section search; P is smooth and locally unimodal around the
        // endpoint minimum.
        const BigReal inv_phi = (sqrt(BigReal(5)) - 1) / 2;
        BigReal a = lo, b = hi;
        BigReal c = b - inv_phi * (b - a);
        BigReal d = a + inv_phi * (b - a);
        BigReal fc = eval(c), fd = eval(d);
        while (b - a > kRefineTol) {
            if (fc < fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - inv_phi * (b - a);
                fc = eval(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + inv_phi * (b - a);
                fd = eval(d);
            }
        }
        BigReal t_min = (a + b) / 2;
        BigReal p_min = eval(t_min);
        if (p_min <= best_p_) {
            return {t_min, p_min};
        }
        return {best_t_, best_p_};
    }

private:
    const State12 &u0_;
    bool have_ = false;
    bool want_right_ = false;
    bool have_right_ = false;
    BigReal best_p_, best_t_;
    StepRecord left_, right_;
};

std::string fmt(const BigReal &x, const PrecisionCtx &ctx)
{
    // Enough digits past working precision that the decimal form reloads to
    // the identical value: checkpoint resume must be bit-for-bit stable.
    return format_decimal(x, ctx.working_digits() + 4);
}

} // namespace

Fraction Fraction::parse(const std::string &s)
{
    Fraction f;
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) {
            f.num = std::stoll(s);
            f.den = 1;
        } else {
            f.num = std::stoll(s.substr(0, slash));
            f.den = std::stoll(s.substr(slash + 1));
        }
    } catch (const std::exception &) {
        throw std::invalid_argument("Fraction: cannot parse '" + s + "'");
    }
    if (f.num <= 0 || f.den <= 0) {
        throw std::invalid_argument("Fraction: must be positive");
    }
    return f;
}

std::string Fraction::str() const
{
    return std::to_string(num) + "/" + std::to_string(den);
}

BigReal Fraction::value(const PrecisionCtx &ctx) const
{
    return make_real(num, ctx) / make_real(den, ctx);
}

void SearchWindow::validate() const
{
    if (!(vx_lo <= vx_hi && vy_lo <= vy_hi)) {
        throw std::invalid_argument("SearchWindow: empty ranges");
    }
    if (vx_lo < 0 || vx_hi > 1 || vy_lo < 0 || vy_hi > 1) {
        throw std::invalid_argument("SearchWindow: window must lie inside [0,1]^2");
    }
    if (!(t0 > 1)) {
        throw std::invalid_argument("SearchWindow: T0 must exceed 1");
    }
    if (!(threshold >= 0)) {
        throw std::invalid_argument("SearchWindow: threshold must be >= 0");
    }
}

BigReal grid_value(const BigReal &lo, int index, const Fraction &step, const PrecisionCtx &ctx)
{
    ScopedPrecision sp(ctx);
    return lo + (make_real(static_cast<long>(index), ctx) * step.num) / step.den;
}

ReturnProx return_proximity(const BigReal &vx, const BigReal &vy, const BigReal &t0,
                            const PrecisionCtx &ctx)
{
    ScopedPrecision sp(ctx);
    SearchPoint p{vx, vy, t0};
    const State12 u0 = initial_state(p, ctx);
    BracketTracker tracker(u0);
    integrate(u0, t0, ctx, [&](const StepRecord &rec) { tracker.on_step(rec); });
    return tracker.refine(t0);
}

ScanResult scan(const SearchWindow &window, const PrecisionCtx &ctx, int workers,
                const std::string &checkpoint_path)
{
    window.validate();
    if (workers < 1) {
        throw std::invalid_argument("scan: workers must be >= 1");
    }
    ScopedPrecision sp(ctx);

    const BigReal step = window.grid_step.value(ctx);
    // Node counts; a hair of slack so exact multiples are kept.
    auto count = [&](const BigReal &lo, const BigReal &hi) {
        BigReal n = (hi - lo) / step + BigReal("1e-9");
        return static_cast<int>(floor(n)) + 1;
    };
    ScanResult out;
    out.nx = count(window.vx_lo, window.vx_hi);
    out.ny = count(window.vy_lo, window.vy_hi);
    const std::size_t total = static_cast<std::size_t>(out.nx) * static_cast<std::size_t>(out.ny);

    // Resume: load completed node outcomes.
    std::map<std::pair<int, int>, NodeOutcome> done;
    if (!checkpoint_path.empty()) {
        std::ifstream in(checkpoint_path);
        std::string line;
        while (in && std::getline(in, line)) {
            if (line.empty()) {
                continue;
            }
            json rec = json::parse(line, nullptr, false);
            if (rec.is_discarded()) {
                continue; // torn tail write from an interrupted run
            }
            NodeOutcome n;
            n.i = rec.at("i").get<int>();
            n.j = rec.at("j").get<int>();
            n.status = rec.at("status").get<std::string>();
            if (n.status == "ok") {
                n.t_ret = make_real(rec.at("t_ret").get<std::string>(), ctx);
                n.p_ret = make_real(rec.at("p_ret").get<std::string>(), ctx);
            }
            done[{n.i, n.j}] = n;
        }
    }

    std::vector<NodeOutcome> nodes(total);
    std::vector<std::pair<int, int>> todo;
    for (int i = 0; i < out.nx; ++i) {
        for (int j = 0; j < out.ny; ++j) {
            auto it = done.find({i, j});
            if (it != done.end()) {
                nodes[static_cast<std::size_t>(i) * out.ny + j] = it->second;
            } else {
                todo.emplace_back(i, j);
            }
        }
    }

    std::ofstream ckpt;
    std::mutex ckpt_mutex;
    if (!checkpoint_path.empty()) {
        ckpt.open(checkpoint_path, std::ios::app);
        if (!ckpt) {
            throw io_error("scan: cannot open checkpoint file " + checkpoint_path);
        }
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            std::size_t idx = next.fetch_add(1);
            if (idx >= todo.size()) {
                return;
            }
            const auto [i, j] = todo[idx];
            NodeOutcome n;
            n.i = i;
            n.j = j;
            BigReal vx = grid_value(window.vx_lo, i, window.grid_step, ctx);
            BigReal vy = grid_value(window.vy_lo, j, window.grid_step, ctx);
            try {
                ReturnProx rp = return_proximity(vx, vy, window.t0, ctx);
                n.status = "ok";
                n.t_ret = rp.t_ret;
                n.p_ret = rp.p_ret;
            } catch (const collision_error &) {
                n.status = "collision";
            } catch (const step_underflow_error &) {
                n.status = "underflow";
            }
            nodes[static_cast<std::size_t>(i) * out.ny + j] = n;
            if (ckpt.is_open()) {
                json rec{{"i", n.i}, {"j", n.j}, {"status", n.status}};
                if (n.status == "ok") {
                    rec["t_ret"] = fmt(n.t_ret, ctx);
                    rec["p_ret"] = fmt(n.p_ret, ctx);
                }
                std::lock_guard<std::mutex> lk(ckpt_mutex);
                ckpt << rec.dump() << "\n";
                ckpt.flush();
            }
        }
    };

    if (workers == 1 || todo.size() <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back(worker);
        }
        for (auto &t : pool) {
            t.join();
        }
    }

    // Candidate selection: below threshold and minimal among grid neighbors.
    auto p_at = [&](int i, int j) -> const NodeOutcome & {
        return nodes[static_cast<std::size_t>(i) * out.ny + j];
    };
    for (int i = 0; i < out.nx; ++i) {
        for (int j = 0; j < out.ny; ++j) {
            const NodeOutcome &n = p_at(i, j);
            if (n.status != "ok") {
                ++out.failures;
                continue;
            }
            if (!(n.p_ret < window.threshold)) {
                continue;
            }
            bool is_min = true;
            for (int di = -1; di <= 1 && is_min; ++di) {
                for (int dj = -1; dj <= 1 && is_min; ++dj) {
                    if (di == 0 && dj == 0) {
                        continue;
                    }
                    int ni = i + di, nj = j + dj;
                    if (ni < 0 || nj < 0 || ni >= out.nx || nj >= out.ny) {
                        continue;
                    }
                    const NodeOutcome &m = p_at(ni, nj);
                    if (m.status == "ok" && m.p_ret < n.p_ret) {
                        is_min = false;
                    }
                }
            }
            if (is_min) {
                Candidate c;
                c.i = i;
                c.j = j;
                c.vx = grid_value(window.vx_lo, i, window.grid_step, ctx);
                c.vy = grid_value(window.vy_lo, j, window.grid_step, ctx);
                c.t_ret = n.t_ret;
                c.p_ret = n.p_ret;
                out.candidates.push_back(c);
            }
        }
    }
    out.nodes = std::move(nodes);
    return out;
}

} // namespace tbp
