#include "ergoscope/measures.hpp"

#include "ergoscope/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace ergoscope {

namespace {

struct Segment {
    Rational lo, hi, v_lo, v_hi;
};

Rational segment_mass(const Segment& s, const Rational& t) {
    // Mass of the segment on [lo, t] with lo <= t <= hi.
    Rational x = t - s.lo;
    return s.v_lo * x + (s.v_hi - s.v_lo) * x * x / (2 * (s.hi - s.lo));
}

Rational segment_value(const Segment& s, const Rational& x) {
    return s.v_lo + (s.v_hi - s.v_lo) * (x - s.lo) / (s.hi - s.lo);
}

// Unified exact view: atoms plus density segments, each with prefix masses.
class ExactView {
public:
    explicit ExactView(const ProbMeasure& p) {
        if (const auto* a = std::get_if<AtomicMeasure>(&p)) {
            atoms_ = a->atoms;
        } else if (const auto* l = std::get_if<PiecewiseLinearDensity>(&p)) {
            for (std::size_t k = 0; k + 1 < l->breakpoints.size(); ++k)
                segs_.push_back({l->breakpoints[k], l->breakpoints[k + 1], l->start_values[k],
                                 l->end_values[k]});
        } else if (const auto* c = std::get_if<PiecewiseConstantDensity>(&p)) {
            for (std::size_t k = 0; k + 1 < c->breakpoints.size(); ++k)
                segs_.push_back(
                    {c->breakpoints[k], c->breakpoints[k + 1], c->values[k], c->values[k]});
        } else {
            fail(ErrorKind::InvalidParams, "exact view of an empirical measure");
        }
        atom_prefix_.push_back(0);
        for (const auto& a : atoms_) atom_prefix_.push_back(atom_prefix_.back() + a.mass);
        seg_prefix_.push_back(0);
        for (const auto& s : segs_) seg_prefix_.push_back(seg_prefix_.back() + segment_mass(s, s.hi));
    }

    Rational total() const { return atom_prefix_.back() + seg_prefix_.back(); }

    Rational cdf(const Rational& t, bool left) const {
        auto it = left ? std::lower_bound(atoms_.begin(), atoms_.end(), t,
                                          [](const Atom& a, const Rational& v) { return a.location < v; })
                       : std::upper_bound(atoms_.begin(), atoms_.end(), t,
                                          [](const Rational& v, const Atom& a) { return v < a.location; });
        Rational out = atom_prefix_[it - atoms_.begin()];
        // Segments with lo < t contribute; densities carry no atoms, so left and right agree.
        auto sit = std::lower_bound(segs_.begin(), segs_.end(), t,
                                    [](const Segment& s, const Rational& v) { return s.lo < v; });
        std::size_t k = sit - segs_.begin();
        out += seg_prefix_[k];
        if (k > 0) {
            const Segment& s = segs_[k - 1];
            if (t < s.hi) out -= segment_mass(s, s.hi) - segment_mass(s, t);
        }
        return out;
    }

    // Density segment covering the open interval (a, b), if any.
    const Segment* covering(const Rational& a, const Rational& b) const {
        auto sit = std::upper_bound(segs_.begin(), segs_.end(), a,
                                    [](const Rational& v, const Segment& s) { return v < s.lo; });
        if (sit == segs_.begin()) return nullptr;
        const Segment& s = *std::prev(sit);
        if (s.lo <= a && b <= s.hi) return &s;
        return nullptr;
    }

    void collect_points(std::vector<Rational>& pts) const {
        for (const auto& a : atoms_) pts.push_back(a.location);
        for (const auto& s : segs_) {
            pts.push_back(s.lo);
            pts.push_back(s.hi);
        }
    }

    const std::vector<Segment>& segments() const { return segs_; }

private:
    std::vector<Atom> atoms_;
    std::vector<Segment> segs_;
    std::vector<Rational> atom_prefix_;
    std::vector<Rational> seg_prefix_;
};

void check_breakpoints(const std::vector<Rational>& b) {
    for (std::size_t k = 0; k + 1 < b.size(); ++k)
        if (!(b[k] < b[k + 1])) fail(ErrorKind::InvalidParams, "breakpoints must increase strictly");
}

Rational exact_of(double x) { return Rational(x); }

}  // namespace

AtomicMeasure make_atomic(std::vector<Atom> atoms) {
    std::sort(atoms.begin(), atoms.end(),
              [](const Atom& a, const Atom& b) { return a.location < b.location; });
    AtomicMeasure out;
    for (auto& a : atoms) {
        if (a.mass < 0) fail(ErrorKind::InvalidParams, "negative atom mass");
        if (a.mass == 0) continue;
        if (!out.atoms.empty() && out.atoms.back().location == a.location)
            out.atoms.back().mass += a.mass;
        else
            out.atoms.push_back(std::move(a));
    }
    return out;
}

PiecewiseLinearDensity make_pl_density(std::vector<Rational> breakpoints,
                                       std::vector<Rational> start_values,
                                       std::vector<Rational> end_values) {
    check_breakpoints(breakpoints);
    std::size_t n = breakpoints.empty() ? 0 : breakpoints.size() - 1;
    if (start_values.size() != n || end_values.size() != n)
        fail(ErrorKind::InvalidParams, "one start and end value per segment");
    for (std::size_t k = 0; k < n; ++k)
        if (start_values[k] < 0 || end_values[k] < 0)
            fail(ErrorKind::InvalidParams, "negative density");
    return {std::move(breakpoints), std::move(start_values), std::move(end_values)};
}

PiecewiseLinearDensity pl_from_nodes(const std::vector<Rational>& breakpoints,
                                     const std::vector<Rational>& values) {
    if (values.size() != breakpoints.size())
        fail(ErrorKind::InvalidParams, "one value per node");
    std::vector<Rational> s, e;
    for (std::size_t k = 0; k + 1 < values.size(); ++k) {
        s.push_back(values[k]);
        e.push_back(values[k + 1]);
    }
    return make_pl_density(breakpoints, std::move(s), std::move(e));
}

PiecewiseLinearDensity pl_from_pieces(const std::vector<LinearPiece>& pieces) {
    std::vector<Rational> xs;
    for (const auto& p : pieces) {
        if (!(p.lo < p.hi)) fail(ErrorKind::InvalidParams, "empty linear piece");
        xs.push_back(p.lo);
        xs.push_back(p.hi);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    std::vector<Rational> s, e;
    for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
        Rational a = 0, b = 0;
        for (const auto& p : pieces) {
            if (p.lo <= xs[k] && xs[k + 1] <= p.hi) {
                Rational slope = (p.v_hi - p.v_lo) / (p.hi - p.lo);
                a += p.v_lo + slope * (xs[k] - p.lo);
                b += p.v_lo + slope * (xs[k + 1] - p.lo);
            }
        }
        s.push_back(a);
        e.push_back(b);
    }
    return make_pl_density(std::move(xs), std::move(s), std::move(e));
}

PiecewiseConstantDensity make_pc_density(std::vector<Rational> breakpoints,
                                         std::vector<Rational> values) {
    check_breakpoints(breakpoints);
    std::size_t n = breakpoints.empty() ? 0 : breakpoints.size() - 1;
    if (values.size() != n) fail(ErrorKind::InvalidParams, "one value per segment");
    for (const auto& v : values)
        if (v < 0) fail(ErrorKind::InvalidParams, "negative density");
    return {std::move(breakpoints), std::move(values)};
}

PiecewiseConstantDensity pc_from_boxes(const std::vector<Box>& boxes) {
    // Sweep over +value at lo, -value at hi.
    std::vector<std::pair<Rational, Rational>> events;
    for (const auto& b : boxes) {
        if (!(b.lo < b.hi)) fail(ErrorKind::InvalidParams, "empty box");
        events.emplace_back(b.lo, b.value);
        events.emplace_back(b.hi, -b.value);
    }
    std::sort(events.begin(), events.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<Rational> xs, vals;
    Rational level = 0;
    for (std::size_t k = 0; k < events.size();) {
        const Rational x = events[k].first;
        while (k < events.size() && events[k].first == x) level += events[k++].second;
        if (k == events.size()) {
            xs.push_back(x);
            break;
        }
        if (!vals.empty() && vals.back() == level) continue;
        xs.push_back(x);
        vals.push_back(level);
    }
    return make_pc_density(std::move(xs), std::move(vals));
}

EmpiricalMeasure make_empirical(std::vector<double> samples, std::vector<double> weights) {
    if (weights.empty()) weights.assign(samples.size(), samples.empty() ? 0.0 : 1.0 / samples.size());
    if (weights.size() != samples.size())
        fail(ErrorKind::InvalidParams, "one weight per sample");
    std::vector<std::size_t> idx(samples.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return samples[a] < samples[b]; });
    EmpiricalMeasure out;
    for (auto i : idx) {
        if (weights[i] < 0) fail(ErrorKind::InvalidParams, "negative weight");
        out.samples.push_back(samples[i]);
        out.weights.push_back(weights[i]);
    }
    return out;
}

bool is_exact(const ProbMeasure& p) { return !std::holds_alternative<EmpiricalMeasure>(p); }

Rational total_mass(const ProbMeasure& p) { return ExactView(p).total(); }

double total_mass_double(const ProbMeasure& p) {
    if (const auto* e = std::get_if<EmpiricalMeasure>(&p)) {
        double s = 0;
        for (double w : e->weights) s += w;
        return s;
    }
    return to_double(total_mass(p));
}

ProbMeasure normalize(const ProbMeasure& p) {
    if (const auto* e = std::get_if<EmpiricalMeasure>(&p)) {
        double m = total_mass_double(p);
        if (m <= 0) fail(ErrorKind::SubProbability, "zero total mass");
        EmpiricalMeasure out = *e;
        for (auto& w : out.weights) w /= m;
        return out;
    }
    Rational m = total_mass(p);
    if (m <= 0) fail(ErrorKind::SubProbability, "zero total mass");
    return std::visit(
        [&](const auto& v) -> ProbMeasure {
            using T = std::decay_t<decltype(v)>;
            T out = v;
            if constexpr (std::is_same_v<T, AtomicMeasure>) {
                for (auto& a : out.atoms) a.mass /= m;
            } else if constexpr (std::is_same_v<T, PiecewiseLinearDensity>) {
                for (auto& x : out.start_values) x /= m;
                for (auto& x : out.end_values) x /= m;
            } else if constexpr (std::is_same_v<T, PiecewiseConstantDensity>) {
                for (auto& x : out.values) x /= m;
            }
            return out;
        },
        p);
}

ProbMeasure rescale(const ProbMeasure& p, const Rational& w) {
    if (w == 0) fail(ErrorKind::ZeroScale, "rescaling by zero");
    const bool flip = w < 0;
    const Rational aw = flip ? Rational(-w) : w;
    if (const auto* a = std::get_if<AtomicMeasure>(&p)) {
        AtomicMeasure out;
        for (const auto& at : a->atoms) out.atoms.push_back({at.location / w, at.mass});
        if (flip) std::reverse(out.atoms.begin(), out.atoms.end());
        return out;
    }
    if (const auto* l = std::get_if<PiecewiseLinearDensity>(&p)) {
        PiecewiseLinearDensity out;
        for (const auto& x : l->breakpoints) out.breakpoints.push_back(x / w);
        for (const auto& x : l->start_values) out.start_values.push_back(x * aw);
        for (const auto& x : l->end_values) out.end_values.push_back(x * aw);
        if (flip) {
            std::reverse(out.breakpoints.begin(), out.breakpoints.end());
            std::reverse(out.start_values.begin(), out.start_values.end());
            std::reverse(out.end_values.begin(), out.end_values.end());
            std::swap(out.start_values, out.end_values);
        }
        return out;
    }
    if (const auto* c = std::get_if<PiecewiseConstantDensity>(&p)) {
        PiecewiseConstantDensity out;
        for (const auto& x : c->breakpoints) out.breakpoints.push_back(x / w);
        for (const auto& x : c->values) out.values.push_back(x * aw);
        if (flip) {
            std::reverse(out.breakpoints.begin(), out.breakpoints.end());
            std::reverse(out.values.begin(), out.values.end());
        }
        return out;
    }
    const auto& e = std::get<EmpiricalMeasure>(p);
    const double wd = to_double(w);
    std::vector<double> s;
    for (double x : e.samples) s.push_back(x / wd);
    return make_empirical(std::move(s), e.weights);
}

Rational cdf_exact(const ProbMeasure& p, const Rational& t) { return ExactView(p).cdf(t, false); }

Rational cdf_left_exact(const ProbMeasure& p, const Rational& t) {
    return ExactView(p).cdf(t, true);
}

namespace {

double empirical_cdf(const EmpiricalMeasure& e, double t, bool left) {
    double s = 0;
    for (std::size_t i = 0; i < e.samples.size(); ++i)
        if (left ? e.samples[i] < t : e.samples[i] <= t) s += e.weights[i];
    return s;
}

}  // namespace

double cdf(const ProbMeasure& p, double t) {
    if (const auto* e = std::get_if<EmpiricalMeasure>(&p)) return empirical_cdf(*e, t, false);
    return to_double(cdf_exact(p, exact_of(t)));
}

Rational ks_distance_exact(const ProbMeasure& p, const ProbMeasure& q) {
    ExactView a(p), b(q);
    if (a.total() != 1 || b.total() != 1)
        fail(ErrorKind::SubProbability, "KS distance needs probability measures");
    std::vector<Rational> pts;
    a.collect_points(pts);
    b.collect_points(pts);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    std::vector<Rational> extra;
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
        const Segment* sa = a.covering(pts[k], pts[k + 1]);
        const Segment* sb = b.covering(pts[k], pts[k + 1]);
        // Roots of the density difference are interior extrema of the CDF difference.
        Rational d0 = (sa ? segment_value(*sa, pts[k]) : Rational(0)) -
                      (sb ? segment_value(*sb, pts[k]) : Rational(0));
        Rational d1 = (sa ? segment_value(*sa, pts[k + 1]) : Rational(0)) -
                      (sb ? segment_value(*sb, pts[k + 1]) : Rational(0));
        if ((d0 < 0 && d1 > 0) || (d0 > 0 && d1 < 0))
            extra.push_back(pts[k] + (pts[k + 1] - pts[k]) * d0 / (d0 - d1));
    }
    pts.insert(pts.end(), extra.begin(), extra.end());
    Rational best = 0;
    for (const auto& t : pts) {
        Rational r = abs(a.cdf(t, false) - b.cdf(t, false));
        Rational l = abs(a.cdf(t, true) - b.cdf(t, true));
        if (r > best) best = r;
        if (l > best) best = l;
    }
    return best;
}

double ks_distance(const ProbMeasure& p, const ProbMeasure& q) {
    if (is_exact(p) && is_exact(q)) return to_double(ks_distance_exact(p, q));
    if (std::abs(total_mass_double(p) - 1) > 1e-9 || std::abs(total_mass_double(q) - 1) > 1e-9)
        fail(ErrorKind::SubProbability, "KS distance needs probability measures");
    std::vector<double> pts;
    auto gather = [&](const ProbMeasure& m) {
        if (const auto* e = std::get_if<EmpiricalMeasure>(&m)) {
            pts.insert(pts.end(), e->samples.begin(), e->samples.end());
        } else {
            std::vector<Rational> r;
            ExactView(m).collect_points(r);
            for (const auto& x : r) pts.push_back(to_double(x));
        }
    };
    gather(p);
    gather(q);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    auto eval = [](const ProbMeasure& m, double t, bool left) {
        if (const auto* e = std::get_if<EmpiricalMeasure>(&m)) return empirical_cdf(*e, t, left);
        return to_double(left ? cdf_left_exact(m, exact_of(t)) : cdf_exact(m, exact_of(t)));
    };
    double best = 0;
    for (double t : pts) {
        best = std::max(best, std::abs(eval(p, t, false) - eval(q, t, false)));
        best = std::max(best, std::abs(eval(p, t, true) - eval(q, t, true)));
    }
    return best;
}

std::vector<Atom> atom_spectrum(const ProbMeasure& p, const Rational& mass_threshold) {
    std::vector<Atom> out;
    if (const auto* a = std::get_if<AtomicMeasure>(&p)) {
        for (const auto& at : a->atoms)
            if (at.mass >= mass_threshold) out.push_back(at);
    } else if (const auto* e = std::get_if<EmpiricalMeasure>(&p)) {
        std::vector<std::pair<double, double>> merged;
        for (std::size_t i = 0; i < e->samples.size(); ++i) {
            if (!merged.empty() && std::abs(e->samples[i] - merged.back().first) <= 1e-12)
                merged.back().second += e->weights[i];
            else
                merged.emplace_back(e->samples[i], e->weights[i]);
        }
        for (const auto& [x, m] : merged)
            if (exact_of(m) >= mass_threshold) out.push_back({exact_of(x), exact_of(m)});
    }
    return out;
}

std::size_t atom_count(const ProbMeasure& p) { return atom_spectrum(p, Rational(0)).size(); }

std::size_t level_components(const ProbMeasure& p, const Rational& level) {
    ExactView v(p);
    // Closed pieces [a, b] of the level set, in order.
    std::vector<std::pair<Rational, Rational>> parts;
    for (const auto& s : v.segments()) {
        if (s.v_lo == level && s.v_hi == level) {
            parts.emplace_back(s.lo, s.hi);
        } else if ((s.v_lo - level) * (s.v_hi - level) <= 0) {
            Rational x = s.lo + (s.hi - s.lo) * (level - s.v_lo) / (s.v_hi - s.v_lo);
            parts.emplace_back(x, x);
        }
    }
    std::size_t count = 0;
    for (std::size_t k = 0; k < parts.size(); ++k)
        if (k == 0 || parts[k].first > parts[k - 1].second) ++count;
    return count;
}

Rational max_density(const ProbMeasure& p) {
    ExactView v(p);
    Rational best = 0;
    for (const auto& s : v.segments()) {
        if (s.v_lo > best) best = s.v_lo;
        if (s.v_hi > best) best = s.v_hi;
    }
    return best;
}

double support_radius(const ProbMeasure& p) {
    double r = 0;
    if (const auto* e = std::get_if<EmpiricalMeasure>(&p)) {
        for (double x : e->samples) r = std::max(r, std::abs(x));
        return r;
    }
    std::vector<Rational> pts;
    ExactView(p).collect_points(pts);
    for (const auto& x : pts) r = std::max(r, std::abs(to_double(x)));
    return r;
}

bool exp_decay_check(const ProbMeasure& p, double c, double b) {
    if (!(c > 0) || !(b > 0)) fail(ErrorKind::InvalidParams, "decay constants must be positive");
    const double total = total_mass_double(p);
    const double radius = support_radius(p);
    std::vector<double> ts;
    const int grid = 2000;
    for (int k = 0; k <= grid; ++k) ts.push_back((2 * radius + 1) * k / grid);
    if (const auto* e = std::get_if<EmpiricalMeasure>(&p)) {
        for (double x : e->samples) ts.push_back(std::abs(x));
    } else {
        std::vector<Rational> pts;
        ExactView(p).collect_points(pts);
        for (const auto& x : pts) ts.push_back(std::abs(to_double(x)));
    }
    const double log_c = std::log(c);
    for (double t : ts) {
        double left = 0;
        if (const auto* e = std::get_if<EmpiricalMeasure>(&p))
            left = empirical_cdf(*e, -t, true);
        else
            left = to_double(cdf_left_exact(p, exact_of(-t)));
        double tail = total - cdf(p, t) + left;
        if (tail <= 1e-300) continue;
        if (!(std::log(tail) < log_c - b * t)) return false;
    }
    return true;
}

double find_decay_constant(const ProbMeasure& p, double b) {
    return std::exp(b * support_radius(p)) * (1 + 1e-9);
}

std::string measure_to_json(const ProbMeasure& p) {
    nlohmann::ordered_json j;
    if (const auto* a = std::get_if<AtomicMeasure>(&p)) {
        j["kind"] = "atomic";
        auto arr = nlohmann::ordered_json::array();
        for (const auto& at : a->atoms) arr.push_back({to_string(at.location), to_string(at.mass)});
        j["atoms"] = arr;
    } else if (const auto* l = std::get_if<PiecewiseLinearDensity>(&p)) {
        j["kind"] = "piecewise_linear";
        std::vector<std::string> b, s, e;
        for (const auto& x : l->breakpoints) b.push_back(to_string(x));
        for (const auto& x : l->start_values) s.push_back(to_string(x));
        for (const auto& x : l->end_values) e.push_back(to_string(x));
        j["breakpoints"] = b;
        j["start_values"] = s;
        j["end_values"] = e;
    } else if (const auto* c = std::get_if<PiecewiseConstantDensity>(&p)) {
        j["kind"] = "piecewise_constant";
        std::vector<std::string> b, v;
        for (const auto& x : c->breakpoints) b.push_back(to_string(x));
        for (const auto& x : c->values) v.push_back(to_string(x));
        j["breakpoints"] = b;
        j["values"] = v;
    } else {
        const auto& e = std::get<EmpiricalMeasure>(p);
        j["kind"] = "empirical";
        j["samples"] = e.samples;
        j["weights"] = e.weights;
    }
    return j.dump();
}

std::string cdf_csv(const ProbMeasure& p, const std::vector<double>& ts) {
    std::string out = "t,F\n";
    char buf[64];
    for (double t : ts) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", t, cdf(p, t));
        out += buf;
    }
    return out;
}

}  // namespace ergoscope
