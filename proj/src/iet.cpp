#include "ergoscope/iet.hpp"

#include "ergoscope/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <random>
#include <set>

namespace ergoscope {

std::string letter_name(int letter) {
    std::string s;
    int v = letter;
    do {
        s.insert(s.begin(), static_cast<char>('A' + v % 26));
        v = v / 26 - 1;
    } while (v >= 0);
    return s;
}

Permutation::Permutation(std::vector<int> top, std::vector<int> bottom)
    : top_(std::move(top)), bottom_(std::move(bottom)) {
    const std::size_t d = top_.size();
    if (d == 0 || bottom_.size() != d)
        fail(ErrorKind::InvalidParams, "permutation rows must be non-empty and of equal size");
    top_pos_.assign(d, -1);
    bottom_pos_.assign(d, -1);
    for (std::size_t k = 0; k < d; ++k) {
        int a = top_[k], b = bottom_[k];
        if (a < 0 || b < 0 || a >= static_cast<int>(d) || b >= static_cast<int>(d) ||
            top_pos_[a] != -1 || bottom_pos_[b] != -1)
            fail(ErrorKind::InvalidParams, "permutation rows are not bijections");
        top_pos_[a] = static_cast<int>(k);
        bottom_pos_[b] = static_cast<int>(k);
    }
}

Permutation Permutation::symmetric(int d) {
    std::vector<int> top(d), bottom(d);
    for (int k = 0; k < d; ++k) {
        top[k] = k;
        bottom[k] = d - 1 - k;
    }
    return Permutation(top, bottom);
}

std::string Permutation::to_string() const {
    std::string s;
    for (int a : top_) s += letter_name(a) + " ";
    s += "/";
    for (int a : bottom_) s += " " + letter_name(a);
    return s;
}

bool is_irreducible(const Permutation& perm) {
    const int d = perm.d();
    for (int k = 1; k < d; ++k) {
        bool closed = true;
        for (int j = 0; j < k && closed; ++j)
            if (perm.bottom_pos(perm.top()[j]) >= k) closed = false;
        if (closed) return false;
    }
    return true;
}

bool endpoint_condition(const Permutation& perm) {
    const int d = perm.d();
    return perm.top()[0] == perm.bottom()[d - 1] && perm.top()[d - 1] == perm.bottom()[0];
}

Matrix identity_matrix(int d) {
    Matrix m(d, std::vector<std::int64_t>(d, 0));
    for (int i = 0; i < d; ++i) m[i][i] = 1;
    return m;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
    const std::size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
    Matrix c(n, std::vector<std::int64_t>(m, 0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t l = 0; l < k; ++l) {
            if (a[i][l] == 0) continue;
            for (std::size_t j = 0; j < m; ++j) {
                std::int64_t prod, sum;
                if (__builtin_mul_overflow(a[i][l], b[l][j], &prod) ||
                    __builtin_add_overflow(c[i][j], prod, &sum))
                    fail(ErrorKind::OutOfRange, "matrix entry overflows 64 bits");
                c[i][j] = sum;
            }
        }
    return c;
}

std::vector<Rational> apply_matrix(const Matrix& a, const std::vector<Rational>& v) {
    std::vector<Rational> out(a.size(), Rational(0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j)
            if (a[i][j] != 0) out[i] += Rational(Integer(static_cast<long>(a[i][j]))) * v[j];
    return out;
}

std::vector<std::int64_t> column_sums(const Matrix& a) {
    std::vector<std::int64_t> s(a.empty() ? 0 : a[0].size(), 0);
    for (const auto& row : a)
        for (std::size_t j = 0; j < row.size(); ++j) s[j] += row[j];
    return s;
}

bool is_positive(const Matrix& a) {
    for (const auto& row : a)
        for (auto v : row)
            if (v <= 0) return false;
    return true;
}

std::int64_t determinant(const Matrix& a) {
    // Bareiss elimination over exact integers.
    const std::size_t n = a.size();
    std::vector<std::vector<Integer>> m(n, std::vector<Integer>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m[i][j] = Integer(static_cast<long>(a[i][j]));
    Integer prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (m[k][k] == 0) {
            std::size_t r = k + 1;
            while (r < n && m[r][k] == 0) ++r;
            if (r == n) return 0;
            std::swap(m[k], m[r]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j)
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
        prev = m[k][k];
    }
    return sign * to_int64(m[n - 1][n - 1]);
}

IET::IET(Permutation perm, std::vector<Rational> lengths)
    : perm_(std::move(perm)), lengths_(std::move(lengths)) {
    const int d = perm_.d();
    if (static_cast<int>(lengths_.size()) != d)
        fail(ErrorKind::InvalidParams, "length vector size does not match the alphabet");
    for (const auto& l : lengths_)
        if (l <= 0) fail(ErrorKind::NonPositiveLength, "length " + to_string(l));
    top_start_.assign(d, Rational(0));
    bottom_start_.assign(d, Rational(0));
    Rational acc = 0;
    for (int a : perm_.top()) {
        top_start_[a] = acc;
        acc += lengths_[a];
    }
    total_ = acc;
    acc = 0;
    for (int a : perm_.bottom()) {
        bottom_start_[a] = acc;
        acc += lengths_[a];
    }
}

Interval IET::interval(int letter) const {
    return {top_start_[letter], top_start_[letter] + lengths_[letter]};
}

int IET::letter_at(const Rational& x) const {
    if (x < 0 || x >= total_) fail(ErrorKind::OutOfDomain, "point " + to_string(x));
    // Last top position whose start is <= x.
    int lo = 0, hi = d() - 1;
    while (lo < hi) {
        int mid = (lo + hi + 1) / 2;
        if (top_start_[perm_.top()[mid]] <= x)
            lo = mid;
        else
            hi = mid - 1;
    }
    return perm_.top()[lo];
}

Rational IET::apply(const Rational& x) const {
    int a = letter_at(x);
    return x - top_start_[a] + bottom_start_[a];
}

Rational IET::apply(const Rational& x, long power) const {
    if (power < 0) return inverse().apply(x, -power);
    Rational y = x;
    for (long i = 0; i < power; ++i) y = apply(y);
    return y;
}

IET IET::normalized() const {
    std::vector<Rational> l = lengths_;
    for (auto& v : l) v /= total_;
    return IET(perm_, std::move(l));
}

std::vector<Rational> IET::discontinuities() const {
    std::vector<Rational> out;
    for (int k = 1; k < d(); ++k) out.push_back(top_start_[perm_.top()[k]]);
    return out;
}

IntervalUnion IET::image(const IntervalUnion& set) const {
    std::vector<Interval> out;
    for (const auto& iv : set.intervals()) {
        Rational lo = iv.lo;
        while (lo < iv.hi) {
            int a = letter_at(lo);
            Rational end = top_start_[a] + lengths_[a];
            Rational hi = end < iv.hi ? end : iv.hi;
            Rational shift = bottom_start_[a] - top_start_[a];
            out.push_back({lo + shift, hi + shift});
            lo = hi;
        }
    }
    return IntervalUnion(std::move(out));
}

IET make_iet(const Permutation& perm, const std::vector<Rational>& lengths, bool normalize) {
    IET t(perm, lengths);
    return normalize ? t.normalized() : t;
}

Rational apply_iet(const IET& t, const Rational& x, long power) { return t.apply(x, power); }

const char* step_type_name(StepType t) { return t == StepType::Top ? "top" : "bottom"; }

RauzyStep rauzy_step(const IET& t) {
    const int d = t.d();
    const auto& perm = t.perm();
    const int a0 = perm.top()[d - 1];
    const int a1 = perm.bottom()[d - 1];
    const Rational& l0 = t.lengths()[a0];
    const Rational& l1 = t.lengths()[a1];
    if (l0 == l1) fail(ErrorKind::DegenerateStep, "last top and bottom lengths are equal");

    std::vector<Rational> lengths = t.lengths();
    std::vector<int> top = perm.top(), bottom = perm.bottom();
    Matrix e = identity_matrix(d);
    RauzyStep step;
    if (l0 > l1) {
        lengths[a0] -= l1;
        bottom.pop_back();
        bottom.insert(bottom.begin() + perm.bottom_pos(a0) + 1, a1);
        e[a0][a1] = 1;
        step.type = StepType::Top;
        step.winner = a0;
        step.loser = a1;
    } else {
        lengths[a1] -= l0;
        top.pop_back();
        top.insert(top.begin() + perm.top_pos(a1) + 1, a0);
        e[a1][a0] = 1;
        step.type = StepType::Bottom;
        step.winner = a1;
        step.loser = a0;
    }
    step.next = IET(Permutation(std::move(top), std::move(bottom)), std::move(lengths));
    step.elementary = std::move(e);
    return step;
}

InductionRecord rauzy_induct(const IET& t, std::size_t n, bool normalized) {
    InductionRecord rec;
    rec.matrix = identity_matrix(t.d());
    rec.end_state = t;
    for (std::size_t j = 0; j < n; ++j) {
        RauzyStep step;
        try {
            step = rauzy_step(rec.end_state);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::DegenerateStep)
                fail(ErrorKind::DegenerateStep, "at step " + std::to_string(j + 1));
            throw;
        }
        rec.matrix = multiply(rec.matrix, step.elementary);
        rec.step_types.push_back(step.type);
        rec.winners.push_back(step.winner);
        if (normalized) {
            rec.scale *= step.next.domain_length();
            rec.end_state = step.next.normalized();
        } else {
            rec.end_state = std::move(step.next);
        }
        ++rec.steps;
    }
    return rec;
}

std::vector<std::size_t> rauzy_run_lengths(const IET& t, std::size_t max_steps) {
    std::vector<std::size_t> runs;
    IET cur = t;
    bool have_prev = false;
    StepType prev = StepType::Top;
    for (std::size_t j = 0; j < max_steps; ++j) {
        const int d = cur.d();
        const int a0 = cur.perm().top()[d - 1];
        const int a1 = cur.perm().bottom()[d - 1];
        if (cur.lengths()[a0] == cur.lengths()[a1]) {
            if (runs.empty())
                runs.push_back(1);
            else
                ++runs.back();
            return runs;
        }
        RauzyStep step = rauzy_step(cur);
        if (have_prev && step.type == prev)
            ++runs.back();
        else
            runs.push_back(1);
        prev = step.type;
        have_prev = true;
        cur = std::move(step.next);
    }
    fail(ErrorKind::NotFound, "induction did not terminate within the step budget");
}

TowerDecomposition tower_decomposition(const IET& t, const InductionRecord& record) {
    const int d = t.d();
    const IET& end = record.end_state;
    if (end.d() != d) fail(ErrorKind::InconsistentRecord, "alphabet size mismatch");
    std::vector<Rational> raw(d);
    for (int a = 0; a < d; ++a) raw[a] = end.lengths()[a] * record.scale;
    if (apply_matrix(record.matrix, raw) != t.lengths())
        fail(ErrorKind::InconsistentRecord, "matrix does not map the induced lengths back");
    const IET induced(end.perm(), raw);
    const Rational& base_end = induced.domain_length();
    const auto heights = column_sums(record.matrix);

    TowerDecomposition out;
    for (int b = 0; b < d; ++b) {
        Tower tower;
        tower.letter = b;
        Interval cur = induced.interval(b);
        while (true) {
            tower.levels.push_back(cur);
            if (static_cast<std::int64_t>(tower.levels.size()) > heights[b])
                fail(ErrorKind::InconsistentRecord,
                     "tower over " + letter_name(b) + " exceeds its column sum");
            int a = t.letter_at(cur.lo);
            if (cur.hi > t.top_start(a) + t.lengths()[a])
                fail(ErrorKind::InconsistentRecord, "tower level straddles a discontinuity");
            Rational shift = t.bottom_start(a) - t.top_start(a);
            cur = {cur.lo + shift, cur.hi + shift};
            if (cur.lo < base_end) break;
        }
        tower.height = static_cast<std::int64_t>(tower.levels.size());
        if (tower.height != heights[b])
            fail(ErrorKind::InconsistentRecord, "tower height differs from column sum");
        if (cur.lo != induced.bottom_start(b))
            fail(ErrorKind::InconsistentRecord, "first return lands in the wrong place");
        out.towers.push_back(std::move(tower));
    }

    std::vector<Interval> all;
    std::set<Rational> lefts;
    for (const auto& tw : out.towers)
        for (const auto& lv : tw.levels) {
            all.push_back(lv);
            lefts.insert(lv.lo);
        }
    Rational sum = total_length(all);
    IntervalUnion un(all);
    if (sum != t.domain_length() || un.measure() != t.domain_length() || un.size() != 1)
        fail(ErrorKind::InconsistentRecord, "tower levels do not partition the domain");
    for (const auto& x : t.discontinuities())
        if (!lefts.count(x))
            fail(ErrorKind::InconsistentRecord, "discontinuity is not a level endpoint");
    return out;
}

Balance rho(const Matrix& b) {
    Balance out;
    out.value = 1;
    for (const auto& row : b) {
        std::int64_t mx = 0, mn = -1;
        for (auto v : row) {
            mx = std::max(mx, v);
            if (mn < 0 || v < mn) mn = v;
        }
        if (mn <= 0) {
            out.infinite = true;
            continue;
        }
        Rational r = make_rational(Integer(static_cast<long>(mx)), Integer(static_cast<long>(mn)));
        if (r > out.value) out.value = r;
    }
    return out;
}

PositivePath find_positive_path(const Permutation& start, std::size_t max_steps,
                                std::uint64_t seed, long max_denominator,
                                std::size_t max_attempts) {
    if (!is_irreducible(start)) fail(ErrorKind::InvalidParams, "start permutation is reducible");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long> numerator(1, max_denominator);
    const int d = start.d();
    for (std::size_t attempt = 1; attempt <= max_attempts; ++attempt) {
        std::vector<Rational> lengths(d);
        for (auto& l : lengths) l = make_rational(numerator(rng), max_denominator);
        IET cur(start, lengths);
        Matrix acc = identity_matrix(d);
        std::vector<StepType> path;
        for (std::size_t j = 0; j < max_steps; ++j) {
            const int a0 = cur.perm().top()[d - 1];
            const int a1 = cur.perm().bottom()[d - 1];
            if (cur.lengths()[a0] == cur.lengths()[a1]) break;
            RauzyStep step = rauzy_step(cur);
            acc = multiply(acc, step.elementary);
            path.push_back(step.type);
            cur = std::move(step.next);
            if (is_positive(acc) && endpoint_condition(cur.perm()))
                return {acc, cur.perm(), path, lengths, attempt};
        }
    }
    fail(ErrorKind::NotFound, "no positive path within " + std::to_string(max_steps) + " steps");
}

std::string iet_to_json(const IET& t) {
    nlohmann::ordered_json j;
    const int d = t.d();
    std::vector<std::string> alphabet, lengths;
    std::vector<int> pi0(d), pi1(d);
    for (int a = 0; a < d; ++a) {
        alphabet.push_back(letter_name(a));
        pi0[a] = t.perm().top_pos(a) + 1;
        pi1[a] = t.perm().bottom_pos(a) + 1;
        lengths.push_back(to_string(t.lengths()[a]));
    }
    j["alphabet"] = alphabet;
    j["pi0"] = pi0;
    j["pi1"] = pi1;
    j["lengths"] = lengths;
    return j.dump();
}

std::string matrix_to_json(const Matrix& m) { return nlohmann::json(m).dump(); }

}  // namespace ergoscope
