#include "ogt/simplex.hpp"

#include <algorithm>

namespace ogt {

namespace {

struct Tableau {
    // rows: m constraints (equality form) + 1 objective row at the end.
    // columns: variables + 1 rhs column at the end.
    std::vector<std::vector<Rational>> t;
    std::vector<int> basis; // basic variable per constraint row
    int rows, cols;         // constraint rows, variable columns

    Rational& at(int i, int j) { return t[i][j]; }
    Rational& rhs(int i) { return t[i][cols]; }
    Rational& obj(int j) { return t[rows][j]; }
    Rational& objval() { return t[rows][cols]; }

    void pivot(int pr, int pc) {
        Rational p = at(pr, pc);
        for (int j = 0; j <= cols; ++j) t[pr][j] /= p;
        for (int i = 0; i <= rows; ++i) {
            if (i == pr) continue;
            Rational f = t[i][pc];
            if (f == 0) continue;
            for (int j = 0; j <= cols; ++j) t[i][j] -= f * t[pr][j];
        }
        basis[pr] = pc;
    }

    // Bland's rule: smallest-index entering column with negative reduced
    // cost, smallest-index leaving row among the ratio-test minimizers.
    bool iterate(bool& unbounded) {
        int pc = -1;
        for (int j = 0; j < cols; ++j)
            if (obj(j) < 0) {
                pc = j;
                break;
            }
        if (pc < 0) return false;
        int pr = -1;
        Rational best;
        for (int i = 0; i < rows; ++i) {
            if (at(i, pc) <= 0) continue;
            Rational ratio = rhs(i) / at(i, pc);
            if (pr < 0 || ratio < best || (ratio == best && basis[i] < basis[pr])) {
                pr = i;
                best = ratio;
            }
        }
        if (pr < 0) {
            unbounded = true;
            return false;
        }
        pivot(pr, pc);
        return true;
    }
};

} // namespace

LPResult solve_lp(const std::vector<std::vector<Rational>>& A, const std::vector<Rational>& b,
                  const std::vector<Rational>& c) {
    const int m = static_cast<int>(A.size());
    const int n = static_cast<int>(c.size());

    // Equality form: A x + s = b with rows flipped so rhs >= 0; rows whose
    // slack then carries a negative sign get an artificial variable.
    std::vector<int> art_col(m, -1);
    int n_art = 0;
    for (int i = 0; i < m; ++i)
        if (b[i] < 0) art_col[i] = n_art++;

    Tableau tab;
    tab.rows = m;
    tab.cols = n + m + n_art;
    tab.t.assign(m + 1, std::vector<Rational>(tab.cols + 1, Rational(0)));
    tab.basis.assign(m, -1);
    for (int i = 0; i < m; ++i) {
        Rational sign = (b[i] < 0) ? Rational(-1) : Rational(1);
        for (int j = 0; j < n; ++j) tab.at(i, j) = sign * A[i][j];
        tab.at(i, n + i) = sign; // slack
        tab.rhs(i) = sign * b[i];
        if (art_col[i] >= 0) {
            tab.at(i, n + m + art_col[i]) = 1;
            tab.basis[i] = n + m + art_col[i];
        } else {
            tab.basis[i] = n + i;
        }
    }

    bool unbounded = false;
    if (n_art > 0) {
        // Phase 1: minimize the artificial sum.
        for (int j = 0; j <= tab.cols; ++j) tab.obj(j) = 0;
        for (int i = 0; i < m; ++i)
            if (art_col[i] >= 0)
                for (int j = 0; j <= tab.cols; ++j) tab.t[m][j] -= tab.t[i][j];
        while (tab.iterate(unbounded)) {}
        if (tab.objval() != 0) return {LPStatus::Infeasible, Rational(0), {}};
        // Pivot any lingering artificial out of the basis.
        for (int i = 0; i < m; ++i) {
            if (tab.basis[i] < n + m) continue;
            int pc = -1;
            for (int j = 0; j < n + m; ++j)
                if (tab.at(i, j) != 0) {
                    pc = j;
                    break;
                }
            if (pc >= 0) tab.pivot(i, pc);
            // A fully zero row is redundant; leaving the artificial basic at
            // value zero is harmless.
        }
    }

    // Phase 2 objective on the original variables.
    for (int j = 0; j <= tab.cols; ++j) tab.obj(j) = 0;
    for (int j = 0; j < n; ++j) tab.obj(j) = c[j];
    for (int j = n + m; j < tab.cols; ++j) tab.obj(j) = Rational(1'000'000'000); // block artificials
    for (int i = 0; i < m; ++i) {
        int bj = tab.basis[i];
        Rational f = tab.obj(bj);
        if (f == 0) continue;
        for (int j = 0; j <= tab.cols; ++j) tab.t[m][j] -= f * tab.t[i][j];
    }
    unbounded = false;
    while (tab.iterate(unbounded)) {}
    if (unbounded) return {LPStatus::Unbounded, Rational(0), {}};

    LPResult out;
    out.status = LPStatus::Optimal;
    out.x.assign(n, Rational(0));
    for (int i = 0; i < m; ++i)
        if (tab.basis[i] < n) out.x[tab.basis[i]] = tab.rhs(i);
    Rational val = 0;
    for (int j = 0; j < n; ++j) val += c[j] * out.x[j];
    out.value = val;
    return out;
}

} // namespace ogt
