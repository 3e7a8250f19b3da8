// One line per acceptance criterion; exit status 1 if any of them fails.

#include "bimodconn/fixtures.hpp"
#include "bimodconn/report.hpp"

#include <functional>
#include <iostream>

using namespace bimodconn;

namespace {

struct Pipeline {
    std::string name;
    Connection c;
    OmegaHat oh;
    JQuotient jq;
    OmegaM om;
    InducedCalculus ic;

    explicit Pipeline(std::string n, Connection conn)
        : name(std::move(n)),
          c(std::move(conn)),
          oh(omega_hat_generate(c, c.truncation() - 2)),
          jq(j_ideal(c, oh)),
          om(quotient_omega_m(c, oh, jq)),
          ic(induced_full_calculus(c, om)) {}
};

// Collects the reasons a criterion fails.
class Criterion {
public:
    void require(bool ok, const std::string& what) {
        if (!ok) problems_.push_back(what);
    }
    void require(const Verdict& v, const std::string& what) {
        require(v.passed(), what + " (" + to_string(v.status) + (v.message.empty() ? "" : ": " + v.message) + ")");
    }
    [[nodiscard]] const std::vector<std::string>& problems() const { return problems_; }

private:
    std::vector<std::string> problems_;
};

Subspace brute_n0(const Module& n, const Module& m) {
    const BalancedTensor t = tensor_over(n, m);
    Subspace out = Subspace::whole(n.dim());
    for (std::size_t a = 0; a < m.dim(); ++a) {
        Matrix pair(t.dim(), n.dim());
        for (std::size_t b = 0; b < n.dim(); ++b) pair.set_column(b, t.project(unit_vector(n.dim(), b), unit_vector(m.dim(), a)));
        out = intersect(out, kernel(pair));
    }
    return out;
}

Subspace brute_m0(const Module& n, const Module& m) {
    const BalancedTensor t = tensor_over(n, m);
    Subspace out = Subspace::whole(m.dim());
    for (std::size_t b = 0; b < n.dim(); ++b) {
        Matrix pair(t.dim(), m.dim());
        for (std::size_t a = 0; a < m.dim(); ++a) pair.set_column(a, t.project(unit_vector(n.dim(), b), unit_vector(m.dim(), a)));
        out = intersect(out, kernel(pair));
    }
    return out;
}

bool nonzero_image(const nlohmann::json& witness) {
    if (!witness.contains("image")) return false;
    for (const auto& x : witness["image"]) {
        if (x != "0") return true;
    }
    return false;
}

}  // namespace

int main() {
    const std::filesystem::path models = BIMODCONN_MODELS_DIR;
    const AlgebraPtr a2 = fixtures::two_point_algebra();
    const AlgebraPtr m2 = fixtures::matrix_algebra();

    std::vector<Pipeline> all;
    all.emplace_back("flat", fixtures::flat_connection());
    all.emplace_back("flat/quotient", differential_connection(fixtures::e1e2_quotient()));
    all.emplace_back("twist", fixtures::twist_connection());
    all.emplace_back("grass", fixtures::grass_connection());
    const Pipeline& flat = all[0];
    const Pipeline& flat_q = all[1];
    const Pipeline& twist = all[2];
    const Pipeline& grass = all[3];

    std::vector<std::pair<std::string, std::function<void(Criterion&)>>> criteria;

    criteria.emplace_back("universal first-order dimension n^2 - n", [&](Criterion& k) {
        k.require(universal_first_order(a2).omega1.dim() == 2, "A2: dim != 2");
        k.require(universal_first_order(m2).omega1.dim() == 12, "M2: dim != 12");
    });

    criteria.emplace_back("right Leibniz rule and derivation law on every connection", [&](Criterion& k) {
        for (const auto& p : all) {
            k.require(check_right_leibniz(p.c), p.name + " right Leibniz");
            k.require(induced_first_order(p.c).derivation, p.name + " derivation");
        }
    });

    criteria.emplace_back("kappa1 d_u = d_nabla", [&](Criterion& k) {
        for (const auto& p : all) {
            k.require(kappa1(p.c).diagram, p.name + " first-order diagram");
            k.require(p.ic.diagram, p.name + " graded diagram");
        }
    });

    criteria.emplace_back("sigma exists for d, absent for the twist", [&](Criterion& k) {
        for (const Pipeline* p : {&flat, &flat_q}) {
            const Sigma s = sigma_exists(p->c, kappa1(p->c));
            k.require(s.map.has_value(), p->name + " has no sigma");
            k.require(s.left_leibniz, p->name + " left Leibniz");
        }
        const Sigma s = sigma_exists(twist.c, kappa1(twist.c));
        k.require(s.exists.status == Status::absent, "twist sigma is not absent");
        k.require(nonzero_image(s.exists.witness), "twist witness has no nonzero image");
    });

    criteria.emplace_back("curvature: right linear, not left linear, left linear on Omega(M)", [&](Criterion& k) {
        for (const auto& p : all) {
            k.require(curvature(p.c).right_linear, p.name + " right Omega-linearity");
            k.require(p.om.left_linear, p.name + " left linearity on Omega(M)");
        }
        const Verdict left = curvature(grass.c).left_linear;
        k.require(left.status == Status::fail, "grass curvature is left linear");
        k.require(!left.witness.is_null(), "grass left-linearity failure has no witness");
    });

    criteria.emplace_back("J^0 = J^1 = 0, nabla J in J, Phi J in J", [&](Criterion& k) {
        for (const auto& p : all) {
            k.require(p.c.truncation() == 3, p.name + " truncation");
            k.require(p.jq.low_degrees, p.name + " low degrees");
            k.require(p.jq.nabla_closed, p.name + " nabla closure");
            k.require(p.jq.omega_hat_closed, p.name + " Omega-hat closure");
        }
    });

    criteria.emplace_back("d_nabla^2 = 0 within the truncation", [&](Criterion& k) {
        for (const auto& p : all) k.require(p.ic.d_squared, p.name + " d_nabla^2");
        k.require(grass.ic.upstairs_nonzero > 0, "grass: nabla-hat^2 vanishes before factoring");
    });

    criteria.emplace_back("sigma_u multiplicative and compatible with nabla", [&](Criterion& k) {
        for (const Pipeline* p : {&flat, &flat_q}) {
            const SigmaFull s = sigma_full(p->c, p->om, p->ic);
            k.require(s.exists, p->name + " sigma_u exists");
            k.require(s.degree0, p->name + " degree 0");
            k.require(s.multiplicative, p->name + " multiplicativity");
            k.require(s.compatibility, p->name + " compatibility");
        }
    });

    criteria.emplace_back("tensor connections: both routes, associated square, degeneracy", [&](Criterion& k) {
        for (const Pipeline* p : {&flat, &flat_q}) {
            const NuHat nu = nu_hat(p->c.forms(), p->ic.calculus);
            k.require(nu.exists, p->name + " nu-hat");
            const TensorConnection original = tensor_connection_original(p->c, p->c, nu, p->ic.calculus);
            const TensorConnection via_sigma = tensor_connection_sigma(p->c, p->c, sigma_exists(p->c, kappa1(p->c)));
            k.require(original.right_leibniz, p->name + " nu-hat route right Leibniz");
            k.require(via_sigma.right_leibniz, p->name + " sigma route right Leibniz");
            k.require(routes_agree(original, via_sigma), p->name + " routes agree");
            const AssociatedConnection assoc = associated_connection(p->c, nu, p->ic.calculus);
            k.require(assoc.square, p->name + " associated square");
        }
        const std::vector<Module> a2_modules{Module::regular(a2), fixtures::swapped_two_point_bimodule(a2),
                                             Module::right_module("A2/e1A2", a2, 1, {Matrix(1, 1), Matrix::identity(1)})};
        std::vector<std::pair<Module, Module>> pairs;
        for (const auto& n : a2_modules) {
            for (const auto& m : a2_modules) {
                if (m.has_left()) pairs.emplace_back(n, m);
            }
        }
        pairs.emplace_back(grass.c.module(), grass.c.module());
        pairs.emplace_back(grass.c.module(), Module::regular(m2));
        for (const auto& [n, m] : pairs) {
            const DegeneracyPair d = degeneracy_submodules(n, m);
            const std::string name = n.name() + " * " + m.name();
            k.require(d.n0 == brute_n0(n, m), name + " N0 differs from the pairing oracle");
            k.require(d.m0 == brute_m0(n, m), name + " M0 differs from the pairing oracle");
        }
    });

    criteria.emplace_back("run(all) reports are byte-identical", [&](Criterion& k) {
        for (const auto* name : {"a2_flat", "a2_quotient", "twist"}) {
            const ModelFile m = parse_model(models / (std::string(name) + ".model"));
            const std::string first = run(Command::all, m).to_json().dump(2);
            const std::string second = run(Command::all, parse_model(models / (std::string(name) + ".model")))
                                           .to_json()
                                           .dump(2);
            k.require(first == second, std::string(name) + " reports differ");
        }
    });

    bool ok = true;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Criterion k;
        try {
            criteria[i].second(k);
        } catch (const std::exception& e) {
            k.require(false, std::string("exception: ") + e.what());
        }
        const bool passed = k.problems().empty();
        ok = ok && passed;
        std::cout << "criterion " << i + 1 << ": " << (passed ? "PASS" : "FAIL") << "  " << criteria[i].first << '\n';
        for (const auto& p : k.problems()) std::cout << "    " << p << '\n';
    }
    return ok ? 0 : 1;
}
