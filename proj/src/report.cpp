#include "bimodconn/report.hpp"

#include <algorithm>
#include <sstream>

namespace bimodconn {

using nlohmann::json;

namespace {

constexpr const char* invented = "invented";

const std::vector<std::pair<Command, std::string>>& command_names() {
    static const std::vector<std::pair<Command, std::string>> names{
        {Command::check, "check"},         {Command::induce, "induce"},   {Command::sigma, "sigma"},
        {Command::curvature, "curvature"}, {Command::tensor, "tensor"},   {Command::compare, "compare"},
        {Command::all, "all"},
    };
    return names;
}

namespace anchor {
const std::string algebra = "If ${\\cal A}$ is an algebra";
const std::string bimodule = "$M$ an ${\\cal A}$-bimodule";
const std::string right_module = "Let $N$ be a right ${\\cal A}$-module";
const std::string calculus = "$(\\O({\\cal A}),\\d)$ a differential calculus";
const std::string universal = "the univeral first order differential calculus";
const std::string right_leibniz = "the right Leibniz rule";
const std::string extension = "∇(a⊗ω)=(∇a)ω + a⊗dω";
const std::string derivation = "is a derivation since";
const std::string additive_subgroup = "which is the additive subgroup";
const std::string first_order = "defines a first order differential calculus";
const std::string diagram = "the following diagram commutes";
const std::string degree0 = "we put $\\O^0_\\nabla({\\cal A})={\\cal A}$";
const std::string d_squared = "which satisfies additionlly";
const std::string graded_derivation = "is a graded derivation";
const std::string ideal = "universal modulo a graded differential ideal,";
const std::string permutation = "use a generalized permutation";
const std::string left_leibniz = "impose additionally a left Leibniz rule";
const std::string factor = "factor uniquely through the projection";
const std::string right_omega = "is a right Ω-homomorphism";
const std::string not_left = "it is not even a left";
const std::string omega_hat = "finite linear combinations of expressions";
const std::string degree_r = "of degree $r$ we set";
const std::string j_low = "since $J^0=J^1=\\{0\\}$, we put";
const std::string j_closed = "important to note that";
const std::string j_generated = "generated by elements of the form";
const std::string unique_factor = "have unique factorizations";
const std::string projection = "with canonical projection $p$";
const std::string assume = "in the following we assume";
const std::string compatible = "we assume that ∇M₀ ⊂ M₀⊗Ω¹";
const std::string nu_hat = "then we have also a homomorphism";
const std::string associated = "unique associated connection";
const std::string tensor = "A connection on the tensor product";
const std::string interpreted = "interpreted in the sense of";
const std::string tensor_formula = "∇⊗(b⊗a):=ν̂(∇′b)a + b⊗∇a";
const std::string order = "obvious partial ordering on the set";
const std::string iff = "if, and only if  we have";
const std::string sigma_degree0 = "with $\\sigma_u(f\\otimes_\\A\\xi)=f\\xi$";
const std::string graded_first = "graded in the first factor";
}  // namespace anchor

json dims_json(const std::vector<std::size_t>& dims) { return json(dims); }

// Builds the record list; the witness of a non-passing verdict carries its
// message.
class Builder {
public:
    explicit Builder(std::vector<Record>& out) : out_(out) {}

    void add(std::string id, const std::string& anchor, const Verdict& v, json dims = nullptr, json extra = nullptr) {
        json witness = v.witness;
        if (v.status != Status::pass && !v.message.empty()) {
            if (witness.is_null()) witness = json::object();
            if (!witness.is_object()) witness = json{{"value", witness}};
            witness["message"] = v.message;
        }
        if (!extra.is_null()) {
            if (witness.is_null()) witness = json::object();
            for (auto& [k, val] : extra.items()) witness[k] = val;
        }
        out_.push_back({std::move(id), anchor, v.status, std::move(witness), std::move(dims)});
    }
    void unavailable(std::string id, const std::string& anchor, const std::string& why) {
        add(std::move(id), anchor, {Status::unavailable, why, nullptr});
    }

private:
    std::vector<Record>& out_;
};

// For properties that may or may not hold (orders between calculi, left
// linearity of the curvature, hypotheses): not holding is not a failure.
Verdict as_relation(const Verdict& v) {
    if (v.status != Status::fail) return v;
    return {Status::absent, v.message, v.witness};
}

class Pipeline {
public:
    explicit Pipeline(const Connection& c) : c_(c) {}

    [[nodiscard]] const Connection& connection() const { return c_; }
    [[nodiscard]] bool bimodule() const { return c_.module().has_left(); }
    [[nodiscard]] bool deep() const { return bimodule() && c_.truncation() >= 2; }

    const InducedFirstOrder& first_order() { return get(first_order_, [&] { return induced_first_order(c_); }); }
    const Kappa1& k1() { return get(k1_, [&] { return kappa1(c_); }); }
    const Sigma& sigma() { return get(sigma_, [&] { return sigma_exists(c_, k1()); }); }
    const CurvatureReport& curv() { return get(curv_, [&] { return curvature(c_); }); }
    const OmegaHat& oh() {
        return get(oh_, [&] { return omega_hat_generate(c_, std::max<std::size_t>(1, c_.truncation() - 2)); });
    }
    const JQuotient& jq() { return get(jq_, [&] { return j_ideal(c_, oh()); }); }
    const OmegaM& om() { return get(om_, [&] { return quotient_omega_m(c_, oh(), jq()); }); }
    const InducedCalculus& ic() { return get(ic_, [&] { return induced_full_calculus(c_, om()); }); }
    const SigmaFull& sf() { return get(sf_, [&] { return sigma_full(c_, om(), ic()); }); }

private:
    template <typename T, typename F>
    const T& get(std::optional<T>& slot, F make) {
        if (!slot) slot.emplace(make());
        return *slot;
    }

    const Connection& c_;
    std::optional<InducedFirstOrder> first_order_;
    std::optional<Kappa1> k1_;
    std::optional<Sigma> sigma_;
    std::optional<CurvatureReport> curv_;
    std::optional<OmegaHat> oh_;
    std::optional<JQuotient> jq_;
    std::optional<OmegaM> om_;
    std::optional<InducedCalculus> ic_;
    std::optional<SigmaFull> sf_;
};

void run_check(const ModelFile& model, Builder& b) {
    b.add("algebra/axioms", anchor::algebra, check_algebra(*model.algebra), json{{"algebra", model.algebra->dim()}});
    for (const auto& m : model.modules) {
        b.add("module/" + m.name() + "/axioms", m.has_left() ? anchor::bimodule : anchor::right_module,
              check_module(m), json{{"module", m.dim()}});
    }
    const GradedCalculus& calc = *model.calculus;
    b.add("calculus/graded", anchor::calculus, check_graded_calculus(calc), dims_json(calc.dims()));
    b.add("calculus/universal_property", anchor::universal, check_universal_property(calc));
}

void run_check(Pipeline& p, Builder& b) {
    const Connection& c = p.connection();
    const std::string id = "connection/" + c.name() + "/";
    b.add(id + "right_leibniz", anchor::right_leibniz, check_right_leibniz(c));
    b.add(id + "extension", anchor::extension, check_extension(c));
}

void run_induce(Pipeline& p, Builder& b) {
    const std::string id = "connection/" + p.connection().name() + "/induce/";
    if (!p.bimodule()) {
        for (const auto* name : {"omega1", "kappa1", "calculus"}) {
            b.unavailable(id + name, anchor::first_order, "the module has no left action");
        }
        return;
    }
    const InducedFirstOrder& fo = p.first_order();
    b.add(id + "omega1_derivation", anchor::derivation, fo.derivation, json{{"omega1", fo.omega1.dim()}});
    b.add(id + "omega1_right_linear", anchor::additive_subgroup, fo.right_linear);
    const Kappa1& k = p.k1();
    b.add(id + "kappa1_bimodule_linear", anchor::first_order, k.bimodule_linear, json{{"kappa1_rank", k.rank}});
    b.add(id + "kappa1_diagram", anchor::diagram, k.diagram);
    if (!p.deep()) {
        b.unavailable(id + "calculus", anchor::d_squared, "truncation below 2");
        return;
    }
    const InducedCalculus& ic = p.ic();
    const json dims{{"induced", ic.dims()}, {"calculus", p.connection().calculus().dims()}};
    b.add(id + "well_defined", anchor::ideal, ic.well_defined, dims);
    b.add(id + "ideal_closed", anchor::ideal, ic.ideal_closed);
    b.add(id + "degree0", anchor::degree0, ic.degree0);
    b.add(id + "d_squared", anchor::d_squared, ic.d_squared, json{{"upstairs_nonzero", ic.upstairs_nonzero}});
    b.add(id + "diagram", anchor::diagram, ic.diagram);
    b.add(id + "derivation", anchor::graded_derivation, ic.derivation);
}

void run_sigma(Pipeline& p, Builder& b) {
    const std::string id = "connection/" + p.connection().name() + "/sigma/";
    if (!p.bimodule()) {
        b.unavailable(id + "exists", anchor::permutation, "the module has no left action");
        return;
    }
    const Sigma& s = p.sigma();
    json extra = nullptr;
    if (s.map) extra = json{{"sigma", to_json(*s.map)}};
    b.add(id + "exists", anchor::permutation, s.exists, json{{"domain", s.domain.dim()}}, extra);
    b.add(id + "left_leibniz", anchor::left_leibniz, s.left_leibniz);
    b.add(id + "agrees_with_universal", anchor::factor, s.agrees_with_universal);
}

void run_curvature(Pipeline& p, Builder& b) {
    const std::string id = "connection/" + p.connection().name() + "/curvature/";
    if (!p.deep()) {
        b.unavailable(id + "curvature", anchor::right_omega,
                      p.bimodule() ? "truncation below 2" : "the module has no left action");
        return;
    }
    const CurvatureReport& cr = p.curv();
    b.add(id + "right_linear", anchor::right_omega, cr.right_linear, json{{"flat", cr.flat}});
    b.add(id + "left_linear", anchor::not_left, as_relation(cr.left_linear));
    const OmegaHat& oh = p.oh();
    std::vector<std::size_t> oh_dims;
    for (std::size_t r = 0; r <= oh.max_degree; ++r) oh_dims.push_back(oh.dim(r));
    b.add(id + "omega_hat_derivation", anchor::omega_hat, oh.derivation, json{{"omega_hat", oh_dims}});
    b.add(id + "omega_hat_second_power", anchor::degree_r, oh.second_power);
    const JQuotient& jq = p.jq();
    b.add(id + "j_low_degrees", anchor::j_low, jq.low_degrees, json{{"j", jq.dims()}});
    b.add(id + "j_nabla_closed", anchor::j_closed, jq.nabla_closed);
    b.add(id + "j_omega_hat_closed", anchor::j_closed, jq.omega_hat_closed);
    b.add(id + "j_contains_commutators", anchor::j_generated, jq.commutators_in_j,
          json{{"commutators", jq.curvature_commutator_dim}});
    const OmegaM& om = p.om();
    b.add(id + "quotient_factored", anchor::unique_factor, om.factored, json{{"omega_m", om.dims()}});
    b.add(id + "quotient_right_leibniz", anchor::right_leibniz, om.right_leibniz);
    b.add(id + "quotient_right_linear", anchor::right_omega, om.right_linear);
    b.add(id + "quotient_left_linear", anchor::projection, om.left_linear);
    b.add(id + "quotient_coherence", anchor::unique_factor, om.coherence);
}

void run_compare(Pipeline& p, Builder& b) {
    const std::string id = "connection/" + p.connection().name() + "/compare/";
    if (!p.deep()) {
        b.unavailable(id + "order", anchor::order,
                      p.bimodule() ? "truncation below 2" : "the module has no left action");
        return;
    }
    const GradedCalculus& calc = p.connection().calculus();
    const InducedCalculus& ic = p.ic();
    const json dims{{"calculus", calc.dims()}, {"induced", ic.dims()}};
    const SigmaFull& sf = p.sf();
    b.add(id + "induced_precedes_calculus", anchor::order, as_relation(sf.order.verdict), dims);
    b.add(id + "calculus_precedes_induced", anchor::order,
          as_relation(preceq(calc, *ic.calculus, OrderMode::all_degrees).verdict));
    b.add(id + "sigma_u_exists", anchor::iff, sf.exists);
    b.add(id + "sigma_u_degree0", anchor::sigma_degree0, sf.degree0);
    b.add(id + "sigma_u_multiplicative", anchor::graded_first, sf.multiplicative);
    b.add(id + "sigma_u_compatibility", anchor::graded_first, sf.compatibility);
}

void add_route(Builder& b, const std::string& id, const TensorConnection& t, bool requested) {
    json extra = nullptr;
    if (requested && t.connection) extra = json{{"connection", to_json(t.connection->nabla())}};
    b.add(id + "balanced", anchor::interpreted, t.balanced, json{{"tensor", t.tensor.dim()}});
    b.add(id + "right_leibniz", anchor::tensor, t.right_leibniz, nullptr, extra);
}

void run_tensor(const TensorRequest& req, Pipeline& n, Pipeline& m, Builder& b) {
    const std::string id = "tensor/" + req.n_connection + "*" + req.m_connection + "/";
    const Connection& nc = n.connection();
    const Connection& mc = m.connection();
    const DegeneracyPair pair = degeneracy_submodules(nc.module(), mc.module());
    b.add(id + "degeneracy", anchor::assume, pair.submodules, json{{"n0", pair.n0.dim()}, {"m0", pair.m0.dim()}});
    b.add(id + "compatibility", anchor::compatible, as_relation(check_compatibility(mc, nc, pair)));

    std::optional<TensorConnection> induced;
    std::optional<TensorConnection> original;
    if (m.deep()) {
        const NuHat nu = nu_hat(nc.forms(), m.ic().calculus);
        b.add(id + "nu_hat", anchor::nu_hat, nu.exists);
        b.add(id + "nu_hat_right_linear", anchor::nu_hat, nu.right_linear);
        const AssociatedConnection assoc = associated_connection(nc, nu, m.ic().calculus);
        b.add(id + "associated_exists", anchor::associated, assoc.exists);
        b.add(id + "associated_square", anchor::associated, assoc.square);
        b.add(id + "associated_right_leibniz", anchor::right_leibniz, assoc.right_leibniz);
        b.add(id + "associated_unique", anchor::associated, assoc.unique);
        original = tensor_connection_original(nc, mc, nu, m.ic().calculus);
        if (assoc.connection) {
            try {
                induced = tensor_connection_induced(*assoc.connection, mc);
            } catch (const PreconditionError& e) {
                b.unavailable(id + "route_induced", anchor::tensor, e.what());
            }
        } else {
            b.unavailable(id + "route_induced", anchor::tensor, "no associated connection");
        }
    } else {
        b.unavailable(id + "nu_hat", anchor::nu_hat, "truncation below 2");
    }
    const TensorConnection via_sigma = tensor_connection_sigma(nc, mc, m.sigma());

    if (induced) add_route(b, id + "route_induced/", *induced, req.route == Route::induced);
    if (original) add_route(b, id + "route_nu_hat/", *original, req.route == Route::nu_hat);
    add_route(b, id + "route_sigma/", via_sigma, req.route == Route::sigma);
    if (original) b.add(id + "agree_nu_hat_sigma", anchor::tensor_formula, routes_agree(*original, via_sigma));
    if (original && induced) b.add(id + "agree_induced_nu_hat", anchor::tensor_formula, routes_agree(*induced, *original));
}

}  // namespace

std::string to_string(Command c) {
    for (const auto& [cmd, name] : command_names()) {
        if (cmd == c) return name;
    }
    return "unknown";
}

std::optional<Command> parse_command(const std::string& text) {
    for (const auto& [cmd, name] : command_names()) {
        if (name == text) return cmd;
    }
    return std::nullopt;
}

const std::vector<std::string>& known_anchors() {
    static const std::vector<std::string> all{
        anchor::algebra,     anchor::bimodule,      anchor::right_module, anchor::calculus,   anchor::universal,
        anchor::right_leibniz, anchor::extension,   anchor::derivation,   anchor::additive_subgroup,
        anchor::first_order, anchor::diagram,       anchor::degree0,      anchor::d_squared,  anchor::graded_derivation,
        anchor::ideal,       anchor::permutation,   anchor::left_leibniz, anchor::factor,     anchor::right_omega,
        anchor::not_left,    anchor::omega_hat,     anchor::degree_r,     anchor::j_low,      anchor::j_closed,
        anchor::j_generated, anchor::unique_factor, anchor::projection,   anchor::assume,     anchor::compatible,
        anchor::nu_hat,      anchor::associated,    anchor::tensor,       anchor::interpreted, anchor::tensor_formula,
        anchor::order,       anchor::iff,           anchor::sigma_degree0, anchor::graded_first, invented,
    };
    return all;
}

std::size_t Report::count(Status s) const {
    return static_cast<std::size_t>(
        std::count_if(records.begin(), records.end(), [&](const Record& r) { return r.status == s; }));
}

Status Report::summary() const { return count(Status::fail) > 0 ? Status::fail : Status::pass; }

json Report::to_json() const {
    json recs = json::array();
    for (const auto& r : records) {
        json entry{{"check_id", r.check_id}, {"paper_anchor", r.paper_anchor}, {"status", to_string(r.status)}};
        if (!r.witness.is_null()) entry["witness"] = r.witness;
        if (!r.dims.is_null()) entry["dims"] = r.dims;
        recs.push_back(std::move(entry));
    }
    json counts = json::object();
    for (Status s : {Status::pass, Status::fail, Status::absent, Status::unavailable}) counts[to_string(s)] = count(s);
    return {{"schema", 1},
            {"model", model},
            {"command", command},
            {"truncation", truncation},
            {"records", recs},
            {"summary", {{"verdict", to_string(summary())}, {"counts", counts}}}};
}

std::string Report::to_text() const {
    std::ostringstream out;
    for (const auto& r : records) {
        out << to_string(r.status) << "  " << r.check_id;
        if (r.status != Status::pass && r.witness.is_object() && r.witness.contains("message")) {
            out << "  (" << r.witness["message"].get<std::string>() << ")";
        }
        out << '\n';
    }
    out << "summary: " << to_string(summary()) << " (";
    bool first = true;
    for (Status s : {Status::pass, Status::fail, Status::absent, Status::unavailable}) {
        out << (first ? "" : ", ") << count(s) << ' ' << to_string(s);
        first = false;
    }
    out << ")\n";
    return out.str();
}

Report run(Command command, const ModelFile& model, const std::optional<std::string>& connection) {
    Report report;
    report.model = model.name;
    report.command = to_string(command);
    report.truncation = model.calculus->truncation();
    Builder b(report.records);

    std::vector<Pipeline> pipelines;
    pipelines.reserve(model.connections.size());
    if (connection) {
        pipelines.emplace_back(model.connection(*connection));
    } else {
        for (const auto& c : model.connections) pipelines.emplace_back(c);
    }
    auto pipeline = [&](const std::string& name) -> Pipeline& {
        for (auto& p : pipelines) {
            if (p.connection().name() == name) return p;
        }
        pipelines.emplace_back(model.connection(name));
        return pipelines.back();
    };
    const std::size_t selected = pipelines.size();

    auto wants = [&](Command c) { return command == c || command == Command::all; };
    if (wants(Command::check)) run_check(model, b);
    for (std::size_t i = 0; i < selected; ++i) {
        Pipeline& p = pipelines[i];
        if (wants(Command::check)) run_check(p, b);
        if (wants(Command::induce)) run_induce(p, b);
        if (wants(Command::sigma)) run_sigma(p, b);
        if (wants(Command::curvature)) run_curvature(p, b);
        if (wants(Command::compare)) run_compare(p, b);
    }
    if (wants(Command::tensor)) {
        bool any = false;
        for (const auto& req : model.tensors) {
            if (connection && req.n_connection != *connection && req.m_connection != *connection) continue;
            any = true;
            Pipeline& n = pipeline(req.n_connection);
            Pipeline& m = pipeline(req.m_connection);
            run_tensor(req, n, m, b);
        }
        if (!any) b.unavailable("tensor/requests", invented, "the model has no matching tensor request");
    }
    return report;
}

}  // namespace bimodconn
