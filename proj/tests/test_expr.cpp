#include <doctest.h>

#include <cmath>
#include <cotlift/compiled.hpp>
#include <cotlift/expr.hpp>
#include <cotlift/sampling.hpp>

using namespace cotlift;

namespace {

Expr var(const char* n) { return Expr::variable(n); }

// Random polynomial tree of bounded depth over the given variables.
Expr random_poly(Rng& rng, const std::vector<std::string>& vars, int depth) {
    if (depth == 0 || rng.uniform01() < 0.25) {
        if (rng.uniform01() < 0.4) return Expr::constant(rng.symmetric());
        return Expr::variable(vars[static_cast<std::size_t>(rng.uniform01() * vars.size()) %
                                   vars.size()]);
    }
    double pick = rng.uniform01();
    if (pick < 0.35) return random_poly(rng, vars, depth - 1) + random_poly(rng, vars, depth - 1);
    if (pick < 0.7) return random_poly(rng, vars, depth - 1) * random_poly(rng, vars, depth - 1);
    if (pick < 0.85) return -random_poly(rng, vars, depth - 1);
    return pow(random_poly(rng, vars, depth - 1), 1 + static_cast<int>(rng.uniform01() * 3));
}

double central_difference(const Expr& e, const std::string& v, VarBinding b, double h) {
    double x = b.get(v);
    b.set(v, x + h);
    double plus = eval(e, b);
    b.set(v, x - h);
    double minus = eval(e, b);
    return (plus - minus) / (2.0 * h);
}

}  // namespace

TEST_CASE("eval of basic polynomials") {
    Expr x = var("x"), y = var("y");
    Expr f = x * x + y * y;
    CHECK(eval(f, {{"x", 1.0}, {"y", 1.0}}) == 2.0);
    CHECK(eval(pow(x * x + y * y, 2), {{"x", 1.0}, {"y", 1.0}}) == 4.0);
    Expr g = sin(var("theta")) * x;
    CHECK(eval(g, {{"theta", 0.0}, {"x", 5.0}}) == 0.0);
}

TEST_CASE("eval errors") {
    Expr x = var("x");
    CHECK_THROWS_AS(eval(x, VarBinding{}), UnboundVariableError);
    CHECK_THROWS_AS(eval(sqrt(x), {{"x", -1.0}}), DomainError);
    CHECK_THROWS_AS(eval(pow(x, -1), {{"x", 0.0}}), DomainError);
}

TEST_CASE("eval is deterministic (bit-identical across calls)") {
    Rng rng(99);
    std::vector<std::string> vars = {"x", "y"};
    for (int t = 0; t < 20; ++t) {
        Expr e = random_poly(rng, vars, 5);
        VarBinding b{{"x", rng.symmetric()}, {"y", rng.symmetric()}};
        double v1 = eval(e, b);
        double v2 = eval(e, b);
        CHECK(std::memcmp(&v1, &v2, sizeof v1) == 0);
    }
}

TEST_CASE("diff basics") {
    Expr x = var("x"), y = var("y");
    Expr f = x * x + y * y;
    VarBinding b{{"x", 3.0}, {"y", -2.0}};
    CHECK(eval(f.diff("x"), b) == 6.0);
    CHECK(eval((x * y).diff("y"), b) == 3.0);
    // d/dx (x^2+y^2)^2 at (1,2) = 2*(x^2+y^2)*2x = 20
    Expr g = pow(x * x + y * y, 2);
    CHECK(eval(g.diff("x"), {{"x", 1.0}, {"y", 2.0}}) == doctest::Approx(20.0).epsilon(1e-14));
}

TEST_CASE("sqrt and trig differentiation against central differences") {
    Expr x = var("x");
    Expr e = sqrt(x * x + Expr::constant(1.0)) * sin(x) + exp(x) * cos(x * x);
    for (double pt : {-1.3, -0.4, 0.2, 0.9, 1.7}) {
        VarBinding b{{"x", pt}};
        double sym = eval(e.diff("x"), b);
        double fd = central_difference(e, "x", b, 1e-6);
        CHECK(sym == doctest::Approx(fd).epsilon(1e-7));
    }
}

TEST_CASE("finite-difference agreement on 100 random polynomial trees") {
    Rng rng(20240601);
    std::vector<std::string> vars = {"x", "y", "z"};
    int checked = 0;
    for (int t = 0; t < 100; ++t) {
        Expr e = random_poly(rng, vars, 5);
        VarBinding b;
        for (const auto& v : vars) b.set(v, rng.uniform(-2.0, 2.0));
        for (const auto& v : vars) {
            double sym = eval(e.diff(v), b);
            double fd = central_difference(e, v, b, 1e-5);
            CHECK(std::abs(sym - fd) <= 1e-6 * (1.0 + std::abs(sym)));
            ++checked;
        }
    }
    CHECK(checked == 300);
}

TEST_CASE("diff linearity at sampled points") {
    Rng rng(7);
    std::vector<std::string> vars = {"x", "y"};
    for (int t = 0; t < 25; ++t) {
        Expr f = random_poly(rng, vars, 4);
        Expr g = random_poly(rng, vars, 4);
        double a = rng.symmetric(), c = rng.symmetric();
        Expr combo = Expr::constant(a) * f + Expr::constant(c) * g;
        VarBinding b{{"x", rng.symmetric()}, {"y", rng.symmetric()}};
        double lhs = eval(combo.diff("x"), b);
        double rhs = a * eval(f.diff("x"), b) + c * eval(g.diff("x"), b);
        CHECK(std::abs(lhs - rhs) <= 1e-12 * (1.0 + std::abs(lhs)));
    }
}

TEST_CASE("hessian examples") {
    Expr x = var("x"), y = var("y");
    std::vector<std::string> vars = {"x", "y"};
    VarBinding b{{"x", 0.7}, {"y", -1.1}};

    auto h1 = hessian(x * x + y * y, vars);
    CHECK(eval(h1[0][0], b) == 2.0);
    CHECK(eval(h1[0][1], b) == 0.0);
    CHECK(eval(h1[1][1], b) == 2.0);

    auto h2 = hessian(x * y, vars);
    CHECK(eval(h2[0][1], b) == 1.0);
    CHECK(eval(h2[1][0], b) == 1.0);
    CHECK(eval(h2[0][0], b) == 0.0);

    auto h3 = hessian(pow(x * x + y * y, 2), vars);
    VarBinding origin{{"x", 0.0}, {"y", 0.0}};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) CHECK(eval(h3[i][j], origin) == 0.0);
}

TEST_CASE("hessian symmetry on random polynomials") {
    Rng rng(31);
    std::vector<std::string> vars = {"x", "y", "z"};
    for (int t = 0; t < 20; ++t) {
        Expr e = random_poly(rng, vars, 4);
        auto h = hessian(e, vars);
        VarBinding b;
        for (const auto& v : vars) b.set(v, rng.symmetric());
        for (std::size_t i = 0; i < vars.size(); ++i)
            for (std::size_t j = 0; j < vars.size(); ++j) {
                double hij = eval(h[i][j], b);
                double hji = eval(h[j][i], b);
                CHECK(std::abs(hij - hji) <= 1e-12 * (1.0 + std::abs(hij)));
            }
    }
}

TEST_CASE("compiled evaluation matches tree evaluation bitwise") {
    Rng rng(1234);
    std::vector<std::string> vars = {"x", "y"};
    for (int t = 0; t < 50; ++t) {
        Expr e = random_poly(rng, vars, 5);
        CompiledExpr prog(e, vars);
        double point[2] = {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
        VarBinding b{{"x", point[0]}, {"y", point[1]}};
        double tree = eval(e, b);
        double compiled = prog.eval({point, 2});
        CHECK(std::memcmp(&tree, &compiled, sizeof tree) == 0);
    }
}

TEST_CASE("compiled trig/sqrt expressions") {
    Expr x = var("x"), y = var("y");
    Expr e = sqrt(x * x + y * y) * cos(x) + exp(y) * pow(x + 1.0, -2);
    std::vector<std::string> vars = {"x", "y"};
    CompiledExpr prog(e, vars);
    double point[2] = {0.6, -0.9};
    VarBinding b{{"x", point[0]}, {"y", point[1]}};
    CHECK(prog.eval({point, 2}) == eval(e, b));
    CHECK_THROWS_AS(CompiledExpr(Expr::variable("nope"), vars), UnboundVariableError);
}

TEST_CASE("substitute") {
    Expr x = var("x"), y = var("y");
    Expr e = pow(x, 2) + y;
    std::map<std::string, Expr, std::less<>> repl;
    repl.emplace("x", y + Expr::constant(1.0));
    Expr s = e.substitute(repl);
    CHECK(eval(s, {{"y", 2.0}}) == doctest::Approx(11.0));
    // substituting a constant folds
    std::map<std::string, Expr, std::less<>> zero;
    zero.emplace("x", Expr::constant(0.0));
    CHECK((pow(x, 2) * y).substitute(zero).is_constant());
}

TEST_CASE("same_tree structural equality") {
    Expr x = var("x"), y = var("y");
    CHECK((x * x + y).same_tree(x * x + y));
    CHECK_FALSE((x * x + y).same_tree(x * x - y));
    CHECK_FALSE(pow(x, 2).same_tree(pow(x, 3)));
}

TEST_CASE("VarBinding keeps order and uniqueness") {
    VarBinding b;
    b.set("a", 1.0);
    b.set("b", 2.0);
    b.set("a", 3.0);
    CHECK(b.size() == 2);
    CHECK(b.get("a") == 3.0);
    CHECK(b.entry(0).first == "a");
    CHECK(b.entry(1).first == "b");
}
