#include "modcheck/parser.hpp"

#include <cctype>
#include <set>
#include <sstream>

namespace modcheck {

namespace {

enum class Tok { Ident, String, Int, Punct, Op, End };

struct Token {
    Tok kind;
    std::string text;
    long value = 0;
    int line = 1, col = 1;
};

class Lexer {
  public:
    explicit Lexer(const std::string& src) : src_(src) { next(); }

    const Token& peek() const { return tok_; }

    Token take() {
        Token t = tok_;
        next();
        return t;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg, tok_.line, tok_.col);
    }

  private:
    void next() {
        skip_ws();
        tok_.line = line_;
        tok_.col = col_;
        if (pos_ >= src_.size()) {
            tok_ = {Tok::End, "", 0, line_, col_};
            return;
        }
        char c = src_[pos_];
        if (std::isalpha((unsigned char)c) || c == '_') {
            size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum((unsigned char)src_[pos_]) || src_[pos_] == '_'))
                advance();
            tok_ = {Tok::Ident, src_.substr(start, pos_ - start), 0, tok_.line, tok_.col};
            return;
        }
        if (std::isdigit((unsigned char)c) ||
            (c == '-' && pos_ + 1 < src_.size() && std::isdigit((unsigned char)src_[pos_ + 1]))) {
            size_t start = pos_;
            advance();
            while (pos_ < src_.size() && std::isdigit((unsigned char)src_[pos_])) advance();
            std::string num = src_.substr(start, pos_ - start);
            tok_ = {Tok::Int, num, std::stol(num), tok_.line, tok_.col};
            return;
        }
        if (c == '"') {
            advance();
            std::string s;
            while (pos_ < src_.size() && src_[pos_] != '"') {
                if (src_[pos_] == '\\' && pos_ + 1 < src_.size()) advance();
                s += src_[pos_];
                advance();
            }
            if (pos_ >= src_.size()) throw ParseError("unterminated string", tok_.line, tok_.col);
            advance();  // closing quote
            tok_ = {Tok::String, s, 0, tok_.line, tok_.col};
            return;
        }
        // multi-char operators
        auto two = src_.substr(pos_, 2);
        auto three = src_.substr(pos_, 3);
        if (three == "<=>") {
            pos_ += 3;
            col_ += 3;
            tok_ = {Tok::Op, "<=>", 0, tok_.line, tok_.col};
            return;
        }
        if (two == "/\\" || two == "\\/" || two == "=>" || two == "==") {
            pos_ += 2;
            col_ += 2;
            tok_ = {Tok::Op, two == "==" ? "=" : two, 0, tok_.line, tok_.col};
            return;
        }
        if (std::string("(){}[];:,.~=").find(c) != std::string::npos) {
            advance();
            tok_ = {c == '~' || c == '=' ? Tok::Op : Tok::Punct, std::string(1, c), 0, tok_.line,
                    tok_.col};
            return;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", line_, col_);
    }

    void skip_ws() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '%') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else if (std::isspace((unsigned char)c)) {
                advance();
            } else {
                break;
            }
        }
    }

    void advance() {
        if (src_[pos_] == '\n') {
            line_++;
            col_ = 1;
        } else {
            col_++;
        }
        pos_++;
    }

    const std::string& src_;
    size_t pos_ = 0;
    int line_ = 1, col_ = 1;
    Token tok_;
};

class Parser {
  public:
    explicit Parser(const std::string& src) : lex_(src) {}

    ModuleDef module_definition() {
        ModuleDef def;
        Token kw = expect_ident();
        if (kw.text == "Module") {
            def.is_interface = false;
        } else if (kw.text == "Interface") {
            def.is_interface = true;
        } else {
            throw ParseError("expected 'Module' or 'Interface'", kw.line, kw.col);
        }
        def.name = expect_ident().text;
        expect_punct("(");
        expect_punct(")");
        expect_punct("{");
        std::set<std::string> seen;
        while (!at_punct("}")) {
            Token sec = expect_ident();
            if (!seen.insert(sec.text).second)
                throw ParseError("duplicate section '" + sec.text + "'", sec.line, sec.col);
            if (sec.text == "OperationType") {
                def.operation_type = expect_ident().text;
            } else if (sec.text == "Properties") {
                expect_punct("{");
                while (!at_punct("}")) {
                    std::string key = expect_ident().text;
                    Token v = lex_.take();
                    if (v.kind != Tok::Ident && v.kind != Tok::Int)
                        throw ParseError("expected property value", v.line, v.col);
                    def.properties.emplace_back(key, v.text);
                }
                expect_punct("}");
            } else if (sec.text == "Submodules") {
                expect_punct("{");
                std::set<std::string> names;
                while (!at_punct("}")) {
                    SubmoduleInst sm;
                    Token ty = expect_ident();
                    sm.type = ty.text;
                    Token inst = expect_ident();
                    sm.instance = inst.text;
                    if (!names.insert(sm.instance).second)
                        throw ParseError("duplicate instance name '" + sm.instance + "'", inst.line,
                                         inst.col);
                    expect_punct("(");
                    while (!at_punct(")")) {
                        ParamBinding pb;
                        pb.name = expect_ident().text;
                        expect_punct(":");
                        Token num = lex_.take();
                        if (num.kind != Tok::Int) throw ParseError("expected integer parameter",
                                                                   num.line, num.col);
                        pb.value = num.value;
                        sm.params.push_back(pb);
                        if (at_punct(",")) lex_.take();
                    }
                    expect_punct(")");
                    def.submodules.push_back(std::move(sm));
                }
                expect_punct("}");
            } else if (sec.text == "ConnectionAxioms") {
                expect_punct("{");
                while (!at_punct("}")) def.connection_axioms.push_back(axiom());
                expect_punct("}");
            } else {
                throw ParseError("unknown section '" + sec.text + "'", sec.line, sec.col);
            }
        }
        expect_punct("}");
        if (lex_.peek().kind != Tok::End) lex_.fail("trailing input after module definition");
        if (def.operation_type.empty())
            throw ParseError("module '" + def.name + "' is missing OperationType", 1, 1);
        if (def.is_interface && (!def.submodules.empty() || !def.connection_axioms.empty()))
            throw ParseError("interface '" + def.name + "' may not have submodules or "
                             "connection axioms", 1, 1);
        return def;
    }

    std::tuple<std::string, std::vector<EventDecl>, std::vector<AxiomAst>> axiom_file() {
        Token kw = expect_ident();
        if (kw.text != "ModuleID") throw ParseError("expected 'ModuleID'", kw.line, kw.col);
        std::string module_type = expect_string().text;
        expect_punct(".");
        std::vector<EventDecl> events;
        std::vector<AxiomAst> axioms;
        while (lex_.peek().kind != Tok::End) {
            Token head = expect_ident_peek();
            if (head.text == "DefineEvent") {
                lex_.take();
                EventDecl ev;
                if (lex_.peek().kind == Tok::Ident && lex_.peek().text == "External") {
                    lex_.take();
                    ev.external = true;
                }
                Token idx = lex_.take();
                if (idx.kind != Tok::Int)
                    throw ParseError("expected event index", idx.line, idx.col);
                ev.index = (int)idx.value;
                Token name = expect_string();
                ev.name = name.text;
                for (auto& e : events)
                    if (e.name == ev.name)
                        throw ParseError("duplicate event name '" + ev.name + "'", name.line,
                                         name.col);
                expect_punct(".");
                events.push_back(ev);
            } else if (head.text == "Axiom") {
                axioms.push_back(axiom());
            } else {
                throw ParseError("expected 'DefineEvent' or 'Axiom'", head.line, head.col);
            }
        }
        // indices must be unique and contiguous from 0
        std::vector<bool> used(events.size(), false);
        for (auto& e : events) {
            if (e.index < 0 || e.index >= (int)events.size() || used[e.index])
                throw ParseError("event indices must be contiguous from 0 (event '" + e.name + "')",
                                 1, 1);
            used[e.index] = true;
        }
        return {module_type, events, axioms};
    }

    FormulaPtr expression() {
        FormulaPtr f = formula();
        if (at_punct(".")) lex_.take();
        if (lex_.peek().kind != Tok::End) lex_.fail("trailing input after formula");
        return f;
    }

  private:
    AxiomAst axiom() {
        Token kw = expect_ident();
        if (kw.text != "Axiom") throw ParseError("expected 'Axiom'", kw.line, kw.col);
        AxiomAst ax;
        ax.name = expect_string().text;
        expect_punct(":");
        ax.body = formula();
        expect_punct(".");
        return ax;
    }

    // Lowest precedence: => (right-assoc) and <=> share a level.
    FormulaPtr formula() {
        FormulaPtr lhs = or_expr();
        if (at_op("=>")) {
            lex_.take();
            auto f = Formula::mk(FKind::Implies);
            auto m = std::const_pointer_cast<Formula>(f);
            m->children = {lhs, formula()};
            return f;
        }
        if (at_op("<=>")) {
            lex_.take();
            auto f = Formula::mk(FKind::Iff);
            auto m = std::const_pointer_cast<Formula>(f);
            m->children = {lhs, formula()};
            return f;
        }
        return lhs;
    }

    FormulaPtr or_expr() {
        FormulaPtr first = and_expr();
        if (!at_op("\\/")) return first;
        auto f = std::make_shared<Formula>();
        f->kind = FKind::Or;
        f->children.push_back(first);
        while (at_op("\\/")) {
            lex_.take();
            f->children.push_back(and_expr());
        }
        return f;
    }

    FormulaPtr and_expr() {
        FormulaPtr first = unary();
        if (!at_op("/\\")) return first;
        auto f = std::make_shared<Formula>();
        f->kind = FKind::And;
        f->children.push_back(first);
        while (at_op("/\\")) {
            lex_.take();
            f->children.push_back(unary());
        }
        return f;
    }

    FormulaPtr unary() {
        if (at_op("~")) {
            lex_.take();
            auto f = std::make_shared<Formula>();
            f->kind = FKind::Not;
            f->children.push_back(unary());
            return f;
        }
        return atom();
    }

    FormulaPtr atom() {
        const Token& t = lex_.peek();
        if (t.kind == Tok::Punct && t.text == "(") {
            lex_.take();
            FormulaPtr f = formula();
            expect_punct(")");
            return f;
        }
        if (t.kind != Tok::Ident) lex_.fail("expected formula");
        if (t.text == "forall" || t.text == "exists") return quantifier();
        if (t.text == "AddEdge") {
            lex_.take();
            auto f = std::make_shared<Formula>();
            f->kind = FKind::AddEdge;
            f->edges.push_back(edge_spec());
            return f;
        }
        if (t.text == "AddEdges") {
            lex_.take();
            auto f = std::make_shared<Formula>();
            f->kind = FKind::AddEdge;
            f->list_form = true;
            expect_punct("[");
            f->edges.push_back(edge_spec());
            while (at_punct(";")) {
                lex_.take();
                f->edges.push_back(edge_spec());
            }
            expect_punct("]");
            return f;
        }
        if (t.text == "EdgeExists") {
            lex_.take();
            auto f = std::make_shared<Formula>();
            f->kind = FKind::EdgeExists;
            f->edges.push_back(edge_spec());
            return f;
        }
        if (t.text == "NodeExists") {
            lex_.take();
            auto f = std::make_shared<Formula>();
            f->kind = FKind::NodeExists;
            f->nodes.push_back(node_ref());
            return f;
        }
        if (t.text == "NodesExist") {
            lex_.take();
            auto f = std::make_shared<Formula>();
            f->kind = FKind::NodeExists;
            f->list_form = true;
            expect_punct("[");
            f->nodes.push_back(node_ref());
            while (at_punct(";")) {
                lex_.take();
                f->nodes.push_back(node_ref());
            }
            expect_punct("]");
            return f;
        }
        if (t.text == "SameNode") {
            lex_.take();
            auto f = std::make_shared<Formula>();
            f->kind = FKind::SameNode;
            f->sn_a = node_ref();
            f->sn_b = node_ref();
            return f;
        }
        if (t.text == "Param") {
            lex_.take();
            auto f = std::make_shared<Formula>();
            f->kind = FKind::ParamEq;
            f->param_name = expect_string().text;
            if (!at_op("=")) lex_.fail("expected '=' in parameter comparison");
            lex_.take();
            Token num = lex_.take();
            if (num.kind != Tok::Int) throw ParseError("expected integer", num.line, num.col);
            f->param_value = num.value;
            return f;
        }
        // Predicate application: name followed by zero or more variable args.
        auto f = std::make_shared<Formula>();
        f->kind = FKind::Pred;
        f->pred = lex_.take().text;
        while (lex_.peek().kind == Tok::Ident && !is_connective_boundary(lex_.peek().text))
            f->args.push_back(lex_.take().text);
        return f;
    }

    // Argument scanning stops at keywords that can follow an atom.
    static bool is_connective_boundary(const std::string& s) {
        return s == "forall" || s == "exists" || s == "in" || s == "Axiom" ||
               s == "DefineEvent" || s == "ModuleID";
    }

    FormulaPtr quantifier() {
        Token kw = lex_.take();
        auto f = std::make_shared<Formula>();
        f->kind = kw.text == "forall" ? FKind::Forall : FKind::Exists;
        f->quant_type = expect_ident().text;
        f->var = expect_string().text;
        if (lex_.peek().kind == Tok::Ident && lex_.peek().text == "in") {
            lex_.take();
            f->has_domain = true;
            std::string doms = expect_string().text;
            size_t start = 0;
            while (start <= doms.size()) {
                size_t semi = doms.find(';', start);
                std::string d = doms.substr(start, semi == std::string::npos ? std::string::npos
                                                                             : semi - start);
                if (!d.empty()) f->domain.push_back(d);
                if (semi == std::string::npos) break;
                start = semi + 1;
            }
            if (f->domain.empty())
                throw ParseError("empty quantifier domain", kw.line, kw.col);
        }
        expect_punct(",");
        f->children.push_back(formula());
        return f;
    }

    NodeRef node_ref() {
        expect_punct("(");
        NodeRef nr;
        nr.op_var = expect_ident().text;
        expect_punct(",");
        nr.event = expect_ident().text;
        expect_punct(")");
        return nr;
    }

    EdgeSpec edge_spec() {
        expect_punct("(");
        EdgeSpec e;
        e.src = node_ref();
        expect_punct(",");
        e.dst = node_ref();
        expect_punct(",");
        e.label = expect_string().text;
        expect_punct(")");
        return e;
    }

    Token expect_ident() {
        Token t = lex_.take();
        if (t.kind != Tok::Ident) throw ParseError("expected identifier", t.line, t.col);
        return t;
    }
    Token expect_ident_peek() {
        const Token& t = lex_.peek();
        if (t.kind != Tok::Ident) throw ParseError("expected identifier", t.line, t.col);
        return t;
    }
    Token expect_string() {
        Token t = lex_.take();
        if (t.kind != Tok::String) throw ParseError("expected string literal", t.line, t.col);
        return t;
    }
    void expect_punct(const std::string& p) {
        Token t = lex_.take();
        if ((t.kind != Tok::Punct && t.kind != Tok::Op) || t.text != p)
            throw ParseError("expected '" + p + "'", t.line, t.col);
    }
    bool at_punct(const std::string& p) const {
        return lex_.peek().kind == Tok::Punct && lex_.peek().text == p;
    }
    bool at_op(const std::string& p) const {
        return lex_.peek().kind == Tok::Op && lex_.peek().text == p;
    }

    Lexer lex_;
};

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

int prec_of(const Formula& f) {
    switch (f.kind) {
        case FKind::Forall:
        case FKind::Exists:
            return 0;
        case FKind::Implies:
        case FKind::Iff:
            return 1;
        case FKind::Or:
            return 2;
        case FKind::And:
            return 3;
        case FKind::Not:
            return 4;
        default:
            return 9;
    }
}

void print_node_ref(std::ostream& os, const NodeRef& nr) {
    os << "(" << nr.op_var << ", " << nr.event << ")";
}

void print_edge(std::ostream& os, const EdgeSpec& e) {
    os << "(";
    print_node_ref(os, e.src);
    os << ", ";
    print_node_ref(os, e.dst);
    os << ", " << quote(e.label) << ")";
}

void print_formula(std::ostream& os, const Formula& f, int min_prec) {
    bool parens = prec_of(f) < min_prec;
    if (parens) os << "(";
    switch (f.kind) {
        case FKind::Forall:
        case FKind::Exists:
            os << (f.kind == FKind::Forall ? "forall " : "exists ") << f.quant_type << " "
               << quote(f.var);
            if (f.has_domain) {
                os << " in \"";
                for (size_t i = 0; i < f.domain.size(); i++) {
                    if (i) os << ";";
                    os << f.domain[i];
                }
                os << "\"";
            }
            os << ", ";
            print_formula(os, *f.children[0], 0);
            break;
        case FKind::Implies:
            print_formula(os, *f.children[0], 2);
            os << " => ";
            print_formula(os, *f.children[1], 0);
            break;
        case FKind::Iff:
            print_formula(os, *f.children[0], 2);
            os << " <=> ";
            print_formula(os, *f.children[1], 0);
            break;
        case FKind::Or:
            for (size_t i = 0; i < f.children.size(); i++) {
                if (i) os << " \\/ ";
                print_formula(os, *f.children[i], 3);
            }
            break;
        case FKind::And:
            for (size_t i = 0; i < f.children.size(); i++) {
                if (i) os << " /\\ ";
                print_formula(os, *f.children[i], 4);
            }
            break;
        case FKind::Not:
            os << "~";
            print_formula(os, *f.children[0], 5);
            break;
        case FKind::Pred:
            os << f.pred;
            for (auto& a : f.args) os << " " << a;
            break;
        case FKind::AddEdge:
            if (f.list_form || f.edges.size() > 1) {
                os << "AddEdges [";
                for (size_t i = 0; i < f.edges.size(); i++) {
                    if (i) os << "; ";
                    print_edge(os, f.edges[i]);
                }
                os << "]";
            } else {
                os << "AddEdge ";
                print_edge(os, f.edges[0]);
            }
            break;
        case FKind::EdgeExists:
            os << "EdgeExists ";
            print_edge(os, f.edges[0]);
            break;
        case FKind::NodeExists:
            if (f.list_form || f.nodes.size() > 1) {
                os << "NodesExist [";
                for (size_t i = 0; i < f.nodes.size(); i++) {
                    if (i) os << "; ";
                    print_node_ref(os, f.nodes[i]);
                }
                os << "]";
            } else {
                os << "NodeExists ";
                print_node_ref(os, f.nodes[0]);
            }
            break;
        case FKind::SameNode:
            os << "SameNode ";
            print_node_ref(os, f.sn_a);
            os << " ";
            print_node_ref(os, f.sn_b);
            break;
        case FKind::ParamEq:
            os << "Param " << quote(f.param_name) << " = " << f.param_value;
            break;
        case FKind::ConstTrue:
        case FKind::ConstFalse:
            os << (f.kind == FKind::ConstTrue ? "ConstTrue" : "ConstFalse");
            break;
    }
    if (parens) os << ")";
}

}  // namespace

ModuleDef parse_module_definition(const std::string& text) {
    return Parser(text).module_definition();
}

std::tuple<std::string, std::vector<EventDecl>, std::vector<AxiomAst>> parse_axiom_file(
    const std::string& text) {
    return Parser(text).axiom_file();
}

FormulaPtr parse_litmus_expression(const std::string& text) {
    return Parser(text).expression();
}

bool formula_equal(const Formula& a, const Formula& b) {
    if (a.kind != b.kind) return false;
    if (a.quant_type != b.quant_type || a.var != b.var || a.domain != b.domain ||
        a.has_domain != b.has_domain)
        return false;
    if (a.pred != b.pred || a.args != b.args) return false;
    if (a.edges != b.edges || a.nodes != b.nodes) return false;
    if (!(a.sn_a == b.sn_a) || !(a.sn_b == b.sn_b)) return false;
    if (a.param_name != b.param_name || a.param_value != b.param_value) return false;
    if (a.children.size() != b.children.size()) return false;
    for (size_t i = 0; i < a.children.size(); i++)
        if (!formula_equal(*a.children[i], *b.children[i])) return false;
    return true;
}

std::string pretty_print(const FormulaPtr& f) {
    std::ostringstream os;
    print_formula(os, *f, 0);
    return os.str();
}

namespace {
void print_axiom(std::ostream& os, const AxiomAst& ax, const char* indent) {
    os << indent << "Axiom " << quote(ax.name) << ":\n" << indent;
    print_formula(os, *ax.body, 0);
    os << ".\n";
}
}  // namespace

std::string pretty_print(const ModuleDef& def) {
    std::ostringstream os;
    os << (def.is_interface ? "Interface " : "Module ") << def.name << " () {\n";
    os << "  OperationType " << def.operation_type << "\n";
    os << "  Properties {";
    for (auto& [k, v] : def.properties) os << " " << k << " " << v;
    os << " }\n";
    if (!def.is_interface) {
        os << "  Submodules {\n";
        for (auto& sm : def.submodules) {
            os << "    " << sm.type << " " << sm.instance << " (";
            for (size_t i = 0; i < sm.params.size(); i++) {
                if (i) os << ", ";
                os << sm.params[i].name << " : " << sm.params[i].value;
            }
            os << ")\n";
        }
        os << "  }\n";
        os << "  ConnectionAxioms {\n";
        for (auto& ax : def.connection_axioms) print_axiom(os, ax, "    ");
        os << "  }\n";
    }
    os << "}\n";
    return os.str();
}

std::string pretty_print_axiom_file(const std::string& module_type,
                                    const std::vector<EventDecl>& events,
                                    const std::vector<AxiomAst>& axioms) {
    std::ostringstream os;
    os << "ModuleID " << quote(module_type) << ".\n\n";
    for (auto& e : events) {
        os << "DefineEvent ";
        if (e.external) os << "External ";
        os << e.index << " " << quote(e.name) << ".\n";
    }
    for (auto& ax : axioms) {
        os << "\n";
        print_axiom(os, ax, "");
    }
    return os.str();
}

}  // namespace modcheck
