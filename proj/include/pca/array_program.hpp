// array_program.hpp -- the array-accessing language: parser, interpreter,
// the two-nested-loop shape checks, translation of shaped programs into
// class automata, and bounded Boolean-state reachability.
//
// Variable categories follow the naming convention of the language: names
// starting with i or j are loop variables, p index variables, v data
// variables, and b Boolean variables. Tag constants are bare identifiers
// declared in the program's `sigma:` header and shadow variables.
#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pca/class_automata.hpp"
#include "pca/compile.hpp"
#include "pca/counter_machine.hpp"
#include "pca/data_word.hpp"

namespace pca {

/// Arrays are data words: a tag and a data value per position.
using ArrayValue = DataWord;

struct SourcePos {
    std::size_t line = 0, col = 0;
};

enum class VarKind { Loop, Index, Data, Boolean };

inline std::optional<VarKind> classify_var(const std::string& name) {
    if (name.empty()) return std::nullopt;
    switch (name[0]) {
        case 'i':
        case 'j': return VarKind::Loop;
        case 'p': return VarKind::Index;
        case 'v': return VarKind::Data;
        case 'b': return VarKind::Boolean;
        default: return std::nullopt;
    }
}

struct IndexExpr {
    std::string var; // loop or index variable
    SourcePos pos;
};

struct TagExpr {
    bool is_const = false;
    Tag constant;
    IndexExpr index; // A[index].s when not a constant
    SourcePos pos;
};

struct DataExpr {
    enum class Kind { Var, Const, ArrayData } kind = Kind::Const;
    std::string var;
    std::uint64_t constant = 0;
    IndexExpr index; // A[index].d
    SourcePos pos;
};

struct BoolExpr;
using BoolExprPtr = std::shared_ptr<const BoolExpr>;

struct BoolExpr {
    enum class Kind { True, False, Var, And, Not, IdxEq, IdxLt, DataEq, DataLt, TagEq } kind;
    std::string var;
    BoolExprPtr lhs, rhs; // And both, Not lhs
    IndexExpr ie1, ie2;
    DataExpr de1, de2;
    TagExpr se1, se2;
    SourcePos pos;
};

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;

struct Stmt {
    enum class Kind { Skip, Block, BoolAssign, IndexAssign, DataAssign, If, For, Seq } kind;
    std::string var; // assignment target or loop variable
    BoolExprPtr bexpr;
    IndexExpr iexpr;
    DataExpr dexpr;
    StmtPtr a, b; // Block body / If then,else / For body / Seq halves
    SourcePos pos;
};

struct Program {
    std::vector<Tag> sigma;
    StmtPtr body;
    std::set<std::string> bool_vars, loop_vars, index_vars, data_vars;
};

/// Assignment of values to the Boolean variables only.
using BooleanState = std::map<std::string, bool>;

// --- parser -----------------------------------------------------------------

namespace detail {

struct Token {
    enum class Kind { Ident, Number, Symbol, End } kind = Kind::End;
    std::string text;
    std::uint64_t number = 0;
    SourcePos pos;
};

class Lexer {
public:
    Lexer(std::string_view text, std::size_t first_line) : text_(text), line_(first_line) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_ws();
            if (at_end()) break;
            SourcePos pos{line_, col_};
            char c = peek();
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::string id;
                while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_'))
                    id.push_back(get());
                out.push_back(Token{Token::Kind::Ident, id, 0, pos});
            } else if (std::isdigit(static_cast<unsigned char>(c))) {
                std::string num;
                while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) num.push_back(get());
                out.push_back(Token{Token::Kind::Number, num, parse_nat(num, pos.line), pos});
            } else if (c == ':') {
                get();
                skip_ws(); // tolerate space between ':' and '='
                if (at_end() || peek() != '=')
                    throw ParseError("expected '=' after ':'", pos.line);
                get();
                out.push_back(Token{Token::Kind::Symbol, ":=", 0, pos});
            } else if (std::string("=<;{}()[].").find(c) != std::string::npos) {
                get();
                out.push_back(Token{Token::Kind::Symbol, std::string(1, c), 0, pos});
            } else {
                throw ParseError(std::string("unexpected character '") + c + "'", pos.line);
            }
        }
        out.push_back(Token{Token::Kind::End, "", 0, SourcePos{line_, col_}});
        return out;
    }

private:
    bool at_end() const { return idx_ >= text_.size(); }
    char peek() const { return text_[idx_]; }
    char get() {
        char c = text_[idx_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }
    void skip_ws() {
        while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) get();
    }

    std::string_view text_;
    std::size_t idx_ = 0;
    std::size_t line_ = 1, col_ = 1;
};

class Parser {
public:
    Parser(std::vector<Token> tokens, Program& prog) : toks_(std::move(tokens)), prog_(prog) {}

    StmtPtr parse() {
        StmtPtr body = parse_seq();
        expect_end();
        return body;
    }

private:
    const Token& cur() const { return toks_[i_]; }
    const Token& next() { return toks_[i_++]; }
    bool is_ident(const std::string& s) const {
        return cur().kind == Token::Kind::Ident && cur().text == s;
    }
    bool is_symbol(const std::string& s) const {
        return cur().kind == Token::Kind::Symbol && cur().text == s;
    }
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg + " (column " + std::to_string(cur().pos.col) + ")", cur().pos.line);
    }
    void expect_symbol(const std::string& s) {
        if (!is_symbol(s)) fail("expected '" + s + "'");
        next();
    }
    void expect_ident(const std::string& s) {
        if (!is_ident(s)) fail("expected '" + s + "'");
        next();
    }
    void expect_end() {
        if (cur().kind != Token::Kind::End) fail("trailing input after program");
    }

    bool is_tag(const std::string& name) const {
        return std::find(prog_.sigma.begin(), prog_.sigma.end(), name) != prog_.sigma.end();
    }

    VarKind var_kind(const std::string& name, SourcePos pos) {
        auto k = classify_var(name);
        if (!k)
            throw ParseError("variable '" + name +
                                 "' has no category; names start with i/j (loop), p (index), v (data) or b (Boolean)",
                             pos.line);
        switch (*k) {
            case VarKind::Loop: prog_.loop_vars.insert(name); break;
            case VarKind::Index: prog_.index_vars.insert(name); break;
            case VarKind::Data: prog_.data_vars.insert(name); break;
            case VarKind::Boolean: prog_.bool_vars.insert(name); break;
        }
        return *k;
    }

    StmtPtr make(Stmt s) { return std::make_shared<Stmt>(std::move(s)); }

    StmtPtr parse_seq() {
        StmtPtr first = parse_stmt();
        while (is_symbol(";")) {
            next();
            StmtPtr second = parse_stmt();
            Stmt s;
            s.kind = Stmt::Kind::Seq;
            s.pos = first->pos;
            s.a = first;
            s.b = second;
            first = make(std::move(s));
        }
        return first;
    }

    StmtPtr parse_stmt() {
        SourcePos pos = cur().pos;
        if (is_ident("skip")) {
            next();
            Stmt s;
            s.kind = Stmt::Kind::Skip;
            s.pos = pos;
            return make(std::move(s));
        }
        if (is_symbol("{")) {
            next();
            StmtPtr body = parse_seq();
            expect_symbol("}");
            Stmt s;
            s.kind = Stmt::Kind::Block;
            s.pos = pos;
            s.a = body;
            return make(std::move(s));
        }
        if (is_ident("for")) {
            next();
            if (cur().kind != Token::Kind::Ident) fail("expected a loop variable");
            std::string var = next().text;
            if (var_kind(var, pos) != VarKind::Loop)
                throw ParseError("'" + var + "' cannot head a loop; loop variables start with i or j",
                                 pos.line);
            expect_symbol(":=");
            if (cur().kind != Token::Kind::Number || cur().number != 1) fail("loops run from 1");
            next();
            expect_ident("to");
            expect_ident("length");
            expect_symbol("(");
            expect_ident("A");
            expect_symbol(")");
            expect_ident("do");
            StmtPtr body = parse_stmt();
            Stmt s;
            s.kind = Stmt::Kind::For;
            s.pos = pos;
            s.var = var;
            s.a = body;
            return make(std::move(s));
        }
        if (is_ident("if")) {
            next();
            BoolExprPtr cond = parse_bool();
            expect_ident("then");
            StmtPtr then_branch = parse_stmt();
            expect_ident("else");
            StmtPtr else_branch = parse_stmt();
            Stmt s;
            s.kind = Stmt::Kind::If;
            s.pos = pos;
            s.bexpr = cond;
            s.a = then_branch;
            s.b = else_branch;
            return make(std::move(s));
        }
        if (cur().kind == Token::Kind::Ident) {
            std::string var = next().text;
            if (is_tag(var)) throw ParseError("tag constant '" + var + "' cannot be assigned", pos.line);
            VarKind kind = var_kind(var, pos);
            expect_symbol(":=");
            Stmt s;
            s.pos = pos;
            s.var = var;
            switch (kind) {
                case VarKind::Boolean:
                    s.kind = Stmt::Kind::BoolAssign;
                    s.bexpr = parse_bool();
                    break;
                case VarKind::Index:
                    s.kind = Stmt::Kind::IndexAssign;
                    s.iexpr = parse_index_expr();
                    break;
                case VarKind::Data:
                    s.kind = Stmt::Kind::DataAssign;
                    s.dexpr = parse_data_expr();
                    break;
                case VarKind::Loop:
                    throw ParseError("loop variable '" + var + "' may only be bound by for", pos.line);
            }
            return make(std::move(s));
        }
        fail("expected a statement");
    }

    IndexExpr parse_index_expr() {
        SourcePos pos = cur().pos;
        if (cur().kind != Token::Kind::Ident) fail("expected an index expression");
        std::string var = next().text;
        VarKind kind = var_kind(var, pos);
        if (kind != VarKind::Loop && kind != VarKind::Index)
            throw ParseError("'" + var + "' is not a loop or index variable", pos.line);
        return IndexExpr{var, pos};
    }

    DataExpr parse_data_expr() {
        SourcePos pos = cur().pos;
        DataExpr de;
        de.pos = pos;
        if (cur().kind == Token::Kind::Number) {
            de.kind = DataExpr::Kind::Const;
            de.constant = next().number;
            return de;
        }
        if (is_ident("A")) {
            auto [index, field] = parse_array_access();
            if (field != 'd') throw ParseError("expected A[...].d in a data expression", pos.line);
            de.kind = DataExpr::Kind::ArrayData;
            de.index = index;
            return de;
        }
        if (cur().kind == Token::Kind::Ident) {
            std::string var = next().text;
            if (var_kind(var, pos) != VarKind::Data)
                throw ParseError("'" + var + "' is not a data variable", pos.line);
            de.kind = DataExpr::Kind::Var;
            de.var = var;
            return de;
        }
        fail("expected a data expression");
    }

    std::pair<IndexExpr, char> parse_array_access() {
        expect_ident("A");
        expect_symbol("[");
        IndexExpr index = parse_index_expr();
        expect_symbol("]");
        expect_symbol(".");
        if (cur().kind != Token::Kind::Ident || (cur().text != "s" && cur().text != "d"))
            fail("expected .s or .d after A[...]");
        char field = next().text[0];
        return {index, field};
    }

    BoolExprPtr make_bool(BoolExpr e) { return std::make_shared<BoolExpr>(std::move(e)); }

    BoolExprPtr parse_bool() { return parse_and(); }

    BoolExprPtr parse_and() {
        BoolExprPtr lhs = parse_not();
        while (is_ident("and")) {
            next();
            BoolExprPtr rhs = parse_not();
            BoolExpr e;
            e.kind = BoolExpr::Kind::And;
            e.pos = lhs->pos;
            e.lhs = lhs;
            e.rhs = rhs;
            lhs = make_bool(std::move(e));
        }
        return lhs;
    }

    BoolExprPtr parse_not() {
        if (is_ident("not")) {
            SourcePos pos = cur().pos;
            next();
            BoolExpr e;
            e.kind = BoolExpr::Kind::Not;
            e.pos = pos;
            e.lhs = parse_not();
            return make_bool(std::move(e));
        }
        return parse_atom();
    }

    // A comparison operand, kept untyped until we see what surrounds it.
    struct Operand {
        enum class Kind { Index, Data, Tag, BoolVar } kind;
        IndexExpr ie;
        DataExpr de;
        TagExpr se;
        std::string bool_var;
        SourcePos pos;
    };

    Operand parse_operand() {
        SourcePos pos = cur().pos;
        Operand op;
        op.pos = pos;
        if (cur().kind == Token::Kind::Number) {
            op.kind = Operand::Kind::Data;
            op.de.kind = DataExpr::Kind::Const;
            op.de.constant = next().number;
            op.de.pos = pos;
            return op;
        }
        if (is_ident("A")) {
            auto [index, field] = parse_array_access();
            if (field == 's') {
                op.kind = Operand::Kind::Tag;
                op.se.is_const = false;
                op.se.index = index;
                op.se.pos = pos;
            } else {
                op.kind = Operand::Kind::Data;
                op.de.kind = DataExpr::Kind::ArrayData;
                op.de.index = index;
                op.de.pos = pos;
            }
            return op;
        }
        if (cur().kind != Token::Kind::Ident) fail("expected an expression");
        std::string name = next().text;
        if (is_tag(name)) {
            op.kind = Operand::Kind::Tag;
            op.se.is_const = true;
            op.se.constant = name;
            op.se.pos = pos;
            return op;
        }
        VarKind kind = var_kind(name, pos);
        switch (kind) {
            case VarKind::Loop:
            case VarKind::Index:
                op.kind = Operand::Kind::Index;
                op.ie = IndexExpr{name, pos};
                break;
            case VarKind::Data:
                op.kind = Operand::Kind::Data;
                op.de.kind = DataExpr::Kind::Var;
                op.de.var = name;
                op.de.pos = pos;
                break;
            case VarKind::Boolean:
                op.kind = Operand::Kind::BoolVar;
                op.bool_var = name;
                break;
        }
        return op;
    }

    BoolExprPtr parse_atom() {
        SourcePos pos = cur().pos;
        if (is_ident("true") || is_ident("false")) {
            BoolExpr e;
            e.kind = cur().text == "true" ? BoolExpr::Kind::True : BoolExpr::Kind::False;
            e.pos = pos;
            next();
            return make_bool(std::move(e));
        }
        if (is_symbol("(")) {
            next();
            BoolExprPtr inner = parse_bool();
            expect_symbol(")");
            return inner;
        }

        Operand lhs = parse_operand();
        if (!is_symbol("=") && !is_symbol("<")) {
            if (lhs.kind != Operand::Kind::BoolVar)
                throw ParseError("expected a comparison or a Boolean variable", pos.line);
            BoolExpr e;
            e.kind = BoolExpr::Kind::Var;
            e.var = lhs.bool_var;
            e.pos = pos;
            return make_bool(std::move(e));
        }
        bool less = is_symbol("<");
        next();
        Operand rhs = parse_operand();

        BoolExpr e;
        e.pos = pos;
        if (lhs.kind == Operand::Kind::Index && rhs.kind == Operand::Kind::Index) {
            e.kind = less ? BoolExpr::Kind::IdxLt : BoolExpr::Kind::IdxEq;
            e.ie1 = lhs.ie;
            e.ie2 = rhs.ie;
        } else if (lhs.kind == Operand::Kind::Data && rhs.kind == Operand::Kind::Data) {
            e.kind = less ? BoolExpr::Kind::DataLt : BoolExpr::Kind::DataEq;
            e.de1 = lhs.de;
            e.de2 = rhs.de;
        } else if (lhs.kind == Operand::Kind::Tag && rhs.kind == Operand::Kind::Tag) {
            if (less) throw ParseError("tags admit equality tests only", pos.line);
            e.kind = BoolExpr::Kind::TagEq;
            e.se1 = lhs.se;
            e.se2 = rhs.se;
        } else {
            throw ParseError("comparison operands have different categories", pos.line);
        }
        return make_bool(std::move(e));
    }

    std::vector<Token> toks_;
    std::size_t i_ = 0;
    Program& prog_;
};

} // namespace detail

/// Parses a program file: a `sigma: ...` header naming the tag constants,
/// then the program text. Errors carry 1-based line numbers.
inline Program parse_program(const std::string& text) {
    Program prog;
    std::size_t eol = text.find('\n');
    std::string header = trim(eol == std::string::npos ? text : text.substr(0, eol));
    if (header.rfind("sigma:", 0) != 0)
        throw ParseError("program must start with a 'sigma:' header line", 1);
    for (const std::string& t : split_ws(header.substr(6))) prog.sigma.push_back(t);
    if (prog.sigma.empty()) throw ParseError("sigma header declares no tags", 1);

    std::string rest = eol == std::string::npos ? "" : text.substr(eol + 1);
    detail::Lexer lexer(rest, 2);
    detail::Parser parser(lexer.run(), prog);
    prog.body = parser.parse();
    return prog;
}

// --- interpreter ------------------------------------------------------------

struct ProgramState {
    std::map<std::string, bool> booleans;
    std::map<std::string, std::uint64_t> loops;
    std::map<std::string, std::uint64_t> indexes;
    std::map<std::string, std::uint64_t> datas;
};

namespace detail {

struct Interp {
    const Program& prog;
    const ArrayValue& array;
    ProgramState& st;

    std::uint64_t eval_index(const IndexExpr& ie) const {
        auto li = st.loops.find(ie.var);
        if (li != st.loops.end()) return li->second;
        auto xi = st.indexes.find(ie.var);
        if (xi != st.indexes.end()) return xi->second;
        throw std::logic_error("unbound index expression '" + ie.var + "'");
    }

    std::size_t array_pos(const IndexExpr& ie) const {
        std::uint64_t v = eval_index(ie);
        if (v < 1 || v > array.length())
            throw std::logic_error("array index out of range; index expressions stay within 1..length");
        return static_cast<std::size_t>(v);
    }

    Tag eval_tag(const TagExpr& se) const {
        return se.is_const ? se.constant : array.tag_at(array_pos(se.index));
    }

    std::uint64_t eval_data(const DataExpr& de) const {
        switch (de.kind) {
            case DataExpr::Kind::Const: return de.constant;
            case DataExpr::Kind::Var: return st.datas.at(de.var);
            case DataExpr::Kind::ArrayData: return array.datum_at(array_pos(de.index));
        }
        throw std::logic_error("bad data expression");
    }

    bool eval_bool(const BoolExpr& e) const {
        using K = BoolExpr::Kind;
        switch (e.kind) {
            case K::True: return true;
            case K::False: return false;
            case K::Var: return st.booleans.at(e.var);
            case K::And: return eval_bool(*e.lhs) && eval_bool(*e.rhs);
            case K::Not: return !eval_bool(*e.lhs);
            case K::IdxEq: return eval_index(e.ie1) == eval_index(e.ie2);
            case K::IdxLt: return eval_index(e.ie1) < eval_index(e.ie2);
            case K::DataEq: return eval_data(e.de1) == eval_data(e.de2);
            case K::DataLt: return eval_data(e.de1) < eval_data(e.de2);
            case K::TagEq: return eval_tag(e.se1) == eval_tag(e.se2);
        }
        throw std::logic_error("bad Boolean expression");
    }

    void exec(const Stmt& s) {
        using K = Stmt::Kind;
        switch (s.kind) {
            case K::Skip: return;
            case K::Block: exec(*s.a); return;
            case K::Seq:
                exec(*s.a);
                exec(*s.b);
                return;
            case K::BoolAssign: st.booleans[s.var] = eval_bool(*s.bexpr); return;
            case K::IndexAssign: st.indexes[s.var] = eval_index(s.iexpr); return;
            case K::DataAssign: st.datas[s.var] = eval_data(s.dexpr); return;
            case K::If:
                exec(eval_bool(*s.bexpr) ? *s.a : *s.b);
                return;
            case K::For:
                for (std::uint64_t v = 1; v <= array.length(); ++v) {
                    st.loops[s.var] = v;
                    exec(*s.a);
                }
                return;
        }
    }
};

} // namespace detail

/// Initial state: Booleans false, loop and index variables 1, data variables
/// equal to the first array element's value.
inline ProgramState initial_state(const Program& prog, const ArrayValue& array) {
    ProgramState st;
    for (const std::string& b : prog.bool_vars) st.booleans[b] = false;
    for (const std::string& l : prog.loop_vars) st.loops[l] = 1;
    for (const std::string& p : prog.index_vars) st.indexes[p] = 1;
    for (const std::string& v : prog.data_vars) st.datas[v] = array.data()[0];
    return st;
}

/// Big-step execution over the array; returns the final state.
inline ProgramState interpret(const Program& prog, const ArrayValue& array) {
    ProgramState st = initial_state(prog, array);
    detail::Interp interp{prog, array, st};
    interp.exec(*prog.body);
    return st;
}

inline BooleanState final_booleans(const Program& prog, const ArrayValue& array) {
    return interpret(prog, array).booleans;
}

// --- the two-nested-loop shape ----------------------------------------------

/// Result of the shape checks: the decomposed pieces when the program
/// matches, and the violated clauses when it does not.
struct Nd2Shape {
    bool ok = false;
    std::vector<std::string> violations;
    std::string outer_var, inner_var;
    StmtPtr p1, p2, p3, p4; // null means skip
};

namespace detail {

inline void flatten_seq(const StmtPtr& s, std::vector<StmtPtr>& out) {
    if (!s) return;
    if (s->kind == Stmt::Kind::Seq) {
        flatten_seq(s->a, out);
        flatten_seq(s->b, out);
    } else if (s->kind == Stmt::Kind::Block) {
        flatten_seq(s->a, out);
    } else {
        out.push_back(s);
    }
}

inline StmtPtr reseq(const std::vector<StmtPtr>& items) {
    if (items.empty()) return nullptr;
    StmtPtr cur = items[0];
    for (std::size_t i = 1; i < items.size(); ++i) {
        Stmt s;
        s.kind = Stmt::Kind::Seq;
        s.pos = cur->pos;
        s.a = cur;
        s.b = items[i];
        cur = std::make_shared<Stmt>(std::move(s));
    }
    return cur;
}

inline std::string at(SourcePos pos) { return " (line " + std::to_string(pos.line) + ")"; }

/// Collects restriction violations inside a loop body fragment.
inline void scan_fragment(const StmtPtr& s, const std::string& outer, const std::string& inner,
                          bool inner_allowed, std::vector<std::string>& out) {
    if (!s) return;
    auto scan_index = [&](const IndexExpr& ie, bool position_test) {
        if (ie.var != outer && ie.var != inner)
            out.push_back("uses index or data variables: '" + ie.var + "'" + at(ie.pos));
        else if (ie.var == inner && !inner_allowed)
            out.push_back("refers to the inner position outside the inner loop" + at(ie.pos));
        if (position_test) out.push_back("compares positions" + at(ie.pos));
    };
    std::function<void(const BoolExpr&)> scan_bool = [&](const BoolExpr& e) {
        using K = BoolExpr::Kind;
        switch (e.kind) {
            case K::True:
            case K::False:
            case K::Var: return;
            case K::And:
                scan_bool(*e.lhs);
                scan_bool(*e.rhs);
                return;
            case K::Not: scan_bool(*e.lhs); return;
            case K::IdxLt:
                out.push_back("refers to the order on indices" + at(e.pos));
                scan_index(e.ie1, false);
                scan_index(e.ie2, false);
                return;
            case K::IdxEq:
                scan_index(e.ie1, true);
                scan_index(e.ie2, true);
                return;
            case K::DataLt:
                out.push_back("refers to the order on data" + at(e.pos));
                return;
            case K::DataEq:
                out.push_back("tests data values beyond the loop guard" + at(e.pos));
                return;
            case K::TagEq:
                if (!e.se1.is_const) scan_index(e.se1.index, false);
                if (!e.se2.is_const) scan_index(e.se2.index, false);
                return;
        }
    };
    std::function<void(const Stmt&)> scan_stmt = [&](const Stmt& st) {
        using K = Stmt::Kind;
        switch (st.kind) {
            case K::Skip: return;
            case K::Block: scan_stmt(*st.a); return;
            case K::Seq:
                scan_stmt(*st.a);
                scan_stmt(*st.b);
                return;
            case K::For: out.push_back("contains a loop" + at(st.pos)); return;
            case K::IndexAssign:
                out.push_back("uses index or data variables: '" + st.var + "'" + at(st.pos));
                return;
            case K::DataAssign:
                out.push_back("uses index or data variables: '" + st.var + "'" + at(st.pos));
                return;
            case K::BoolAssign: scan_bool(*st.bexpr); return;
            case K::If:
                scan_bool(*st.bexpr);
                scan_stmt(*st.a);
                scan_stmt(*st.b);
                return;
        }
    };
    scan_stmt(*s);
}

inline bool is_guard(const BoolExpr& e, const std::string& outer, const std::string& inner) {
    if (e.kind != BoolExpr::Kind::DataEq) return false;
    if (e.de1.kind != DataExpr::Kind::ArrayData || e.de2.kind != DataExpr::Kind::ArrayData)
        return false;
    const std::string& v1 = e.de1.index.var;
    const std::string& v2 = e.de2.index.var;
    return (v1 == outer && v2 == inner) || (v1 == inner && v2 == outer);
}

} // namespace detail

/// Checks the two-loop template: an outer loop whose body is P1, an inner
/// loop over `if A[i].d = A[j].d then P2 else P3`, then P4, with the four
/// fragments loop-free, free of index and data variables, and free of
/// position or order tests (the guard is the only data test).
inline Nd2Shape is_restricted_nd2(const Program& prog) {
    Nd2Shape shape;
    auto reject = [&](const std::string& why, SourcePos pos = {}) {
        shape.violations.push_back(pos.line ? why + detail::at(pos) : why);
    };

    const StmtPtr& top = prog.body;
    StmtPtr outer = top;
    if (outer && outer->kind == Stmt::Kind::Block) outer = outer->a;
    if (!outer || outer->kind != Stmt::Kind::For) {
        reject("program is not a single outer loop");
        return shape;
    }
    shape.outer_var = outer->var;

    std::vector<StmtPtr> body;
    detail::flatten_seq(outer->a, body);
    std::vector<StmtPtr> before, after;
    StmtPtr inner;
    for (const StmtPtr& s : body) {
        if (s->kind == Stmt::Kind::For) {
            if (inner) {
                reject("outer body holds two loops", s->pos);
                return shape;
            }
            inner = s;
        } else {
            (inner ? after : before).push_back(s);
        }
    }
    if (!inner) {
        reject("outer body holds no inner loop");
        return shape;
    }
    shape.inner_var = inner->var;
    if (shape.inner_var == shape.outer_var) {
        reject("inner loop reuses the outer loop variable", inner->pos);
        return shape;
    }

    std::vector<StmtPtr> inner_body;
    detail::flatten_seq(inner->a, inner_body);
    if (inner_body.size() != 1 || inner_body[0]->kind != Stmt::Kind::If ||
        !detail::is_guard(*inner_body[0]->bexpr, shape.outer_var, shape.inner_var)) {
        reject("inner body is not a single if A[i].d = A[j].d then .. else ..", inner->pos);
        return shape;
    }

    shape.p1 = detail::reseq(before);
    shape.p2 = inner_body[0]->a;
    shape.p3 = inner_body[0]->b;
    shape.p4 = detail::reseq(after);

    detail::scan_fragment(shape.p1, shape.outer_var, shape.inner_var, false, shape.violations);
    detail::scan_fragment(shape.p2, shape.outer_var, shape.inner_var, true, shape.violations);
    detail::scan_fragment(shape.p3, shape.outer_var, shape.inner_var, true, shape.violations);
    detail::scan_fragment(shape.p4, shape.outer_var, shape.inner_var, false, shape.violations);

    shape.ok = shape.violations.empty();
    return shape;
}

namespace detail {

inline bool mentions_inner(const StmtPtr& s, const std::string& inner);

inline bool expr_mentions_inner(const BoolExpr& e, const std::string& inner) {
    using K = BoolExpr::Kind;
    switch (e.kind) {
        case K::And: return expr_mentions_inner(*e.lhs, inner) || expr_mentions_inner(*e.rhs, inner);
        case K::Not: return expr_mentions_inner(*e.lhs, inner);
        case K::TagEq:
            return (!e.se1.is_const && e.se1.index.var == inner) ||
                   (!e.se2.is_const && e.se2.index.var == inner);
        case K::DataEq:
        case K::DataLt:
            return (e.de1.kind == DataExpr::Kind::ArrayData && e.de1.index.var == inner) ||
                   (e.de2.kind == DataExpr::Kind::ArrayData && e.de2.index.var == inner);
        case K::IdxEq:
        case K::IdxLt: return e.ie1.var == inner || e.ie2.var == inner;
        default: return false;
    }
}

inline bool mentions_inner(const StmtPtr& s, const std::string& inner) {
    if (!s) return false;
    using K = Stmt::Kind;
    switch (s->kind) {
        case K::Skip: return false;
        case K::Block: return mentions_inner(s->a, inner);
        case K::Seq: return mentions_inner(s->a, inner) || mentions_inner(s->b, inner);
        case K::For: return mentions_inner(s->a, inner);
        case K::If:
            return expr_mentions_inner(*s->bexpr, inner) || mentions_inner(s->a, inner) ||
                   mentions_inner(s->b, inner);
        case K::BoolAssign: return expr_mentions_inner(*s->bexpr, inner);
        default: return false;
    }
}

inline bool is_skip_like(const StmtPtr& s) {
    if (!s) return true;
    if (s->kind == Stmt::Kind::Skip) return true;
    if (s->kind == Stmt::Kind::Block) return is_skip_like(s->a);
    return false;
}

/// BB must be a conjunction of literals; returns (var -> polarity) or
/// nothing.
inline std::optional<std::map<std::string, bool>> literal_conjunction(const BoolExpr& e) {
    using K = BoolExpr::Kind;
    std::map<std::string, bool> lits;
    std::function<bool(const BoolExpr&)> walk = [&](const BoolExpr& x) {
        if (x.kind == K::And) return walk(*x.lhs) && walk(*x.rhs);
        if (x.kind == K::Var) {
            lits[x.var] = true;
            return true;
        }
        if (x.kind == K::Not && x.lhs->kind == K::Var) {
            lits[x.lhs->var] = false;
            return true;
        }
        return false;
    };
    if (!walk(e)) return std::nullopt;
    return lits;
}

/// PA must be a composition of constant Boolean assignments; returns the
/// assignments in order or nothing.
inline std::optional<std::vector<std::pair<std::string, bool>>> constant_assignments(
    const StmtPtr& s) {
    std::vector<std::pair<std::string, bool>> out;
    std::function<bool(const StmtPtr&)> walk = [&](const StmtPtr& x) {
        if (!x) return true;
        switch (x->kind) {
            case Stmt::Kind::Skip: return true;
            case Stmt::Kind::Block: return walk(x->a);
            case Stmt::Kind::Seq: return walk(x->a) && walk(x->b);
            case Stmt::Kind::BoolAssign:
                if (x->bexpr->kind == BoolExpr::Kind::True) {
                    out.emplace_back(x->var, true);
                    return true;
                }
                if (x->bexpr->kind == BoolExpr::Kind::False) {
                    out.emplace_back(x->var, false);
                    return true;
                }
                return false;
            default: return false;
        }
    };
    if (!walk(s)) return std::nullopt;
    return out;
}

} // namespace detail

struct ZeroPriorityShape {
    bool ok = false;
    std::string reason; // first violated clause when not ok
};

/// The else-branch must either ignore the inner position entirely, or be a
/// guarded cascade `if BB then if A[j].s = s1 then PA1 ... else skip else
/// skip` with BB a conjunction of literals, constant Boolean assignments in
/// each PAk, and every PAk flipping some literal of BB.
inline ZeroPriorityShape is_zero_priority_nd2(const Program&, const Nd2Shape& shape) {
    ZeroPriorityShape out;
    if (!shape.ok) {
        out.reason = "program is not in the two-loop shape";
        return out;
    }
    if (!detail::mentions_inner(shape.p3, shape.inner_var)) {
        out.ok = true;
        return out;
    }

    StmtPtr p3 = shape.p3;
    while (p3 && p3->kind == Stmt::Kind::Block) p3 = p3->a;
    if (!p3 || p3->kind != Stmt::Kind::If) {
        out.reason = "else-branch reads the inner position but is not a guarded cascade";
        return out;
    }
    auto bb = detail::literal_conjunction(*p3->bexpr);
    if (!bb) {
        out.reason = "cascade guard is not a conjunction of literals";
        return out;
    }
    if (!detail::is_skip_like(p3->b)) {
        out.reason = "cascade must fall through to skip when the guard fails";
        return out;
    }

    StmtPtr arm = p3->a;
    while (arm && arm->kind == Stmt::Kind::Block) arm = arm->a;
    std::size_t arm_count = 0;
    while (true) {
        if (detail::is_skip_like(arm)) break; // end of the chain
        if (!arm || arm->kind != Stmt::Kind::If) {
            out.reason = "cascade arm is not an if on A[j].s";
            return out;
        }
        const BoolExpr& test = *arm->bexpr;
        bool tag_test = test.kind == BoolExpr::Kind::TagEq &&
                        ((test.se1.is_const != test.se2.is_const)) &&
                        ((!test.se1.is_const && test.se1.index.var == shape.inner_var) ||
                         (!test.se2.is_const && test.se2.index.var == shape.inner_var));
        if (!tag_test) {
            out.reason = "cascade arm does not test A[j].s against a tag constant";
            return out;
        }
        auto assigns = detail::constant_assignments(arm->a);
        if (!assigns) {
            out.reason = "cascade arm body is not a composition of constant Boolean assignments";
            return out;
        }
        bool nontrivial = false;
        for (const auto& [var, value] : *assigns) {
            auto lit = bb->find(var);
            if (lit != bb->end() && lit->second != value) nontrivial = true;
        }
        if (!nontrivial) {
            out.reason = "cascade arm never flips a literal of its guard";
            return out;
        }
        ++arm_count;
        arm = arm->b;
        while (arm && arm->kind == Stmt::Kind::Block) arm = arm->a;
    }
    if (arm_count == 0) {
        out.reason = "cascade has no arms";
        return out;
    }
    out.ok = true;
    return out;
}

inline ZeroPriorityShape is_zero_priority_nd2(const Program& prog) {
    return is_zero_priority_nd2(prog, is_restricted_nd2(prog));
}

// --- translation to class automata -------------------------------------------

namespace detail {

/// Boolean states as bit masks over the sorted variable names.
struct BoolSpace {
    std::vector<std::string> order;

    explicit BoolSpace(const std::set<std::string>& vars) : order(vars.begin(), vars.end()) {
        if (order.size() > 10)
            throw std::invalid_argument("translation supports at most 10 Boolean variables");
    }

    std::size_t size() const { return std::size_t{1} << order.size(); }

    std::uint32_t to_mask(const BooleanState& st) const {
        std::uint32_t m = 0;
        for (std::size_t i = 0; i < order.size(); ++i) {
            auto it = st.find(order[i]);
            if (it == st.end())
                throw std::invalid_argument("target misses Boolean variable '" + order[i] + "'");
            if (it->second) m |= 1u << i;
        }
        return m;
    }

    BooleanState to_state(std::uint32_t mask) const {
        BooleanState st;
        for (std::size_t i = 0; i < order.size(); ++i) st[order[i]] = (mask >> i) & 1u;
        return st;
    }
};

/// Effect of a loop-free, Boolean-only fragment on a state mask, with the
/// tags of the owning and the current position fixed.
inline std::uint32_t apply_fragment(const BoolSpace& space, const StmtPtr& stmt, std::uint32_t mask,
                                    const std::string& outer_var, const std::string& inner_var,
                                    const Tag& outer_tag, const Tag& inner_tag) {
    if (!stmt) return mask;
    std::map<std::string, std::size_t> bit;
    for (std::size_t i = 0; i < space.order.size(); ++i) bit[space.order[i]] = i;

    auto tag_of = [&](const TagExpr& se) -> const Tag& {
        if (se.is_const) return se.constant;
        if (se.index.var == outer_var) return outer_tag;
        if (se.index.var == inner_var) return inner_tag;
        throw std::logic_error("fragment reads an unexpected position");
    };
    std::function<bool(const BoolExpr&, std::uint32_t)> eval = [&](const BoolExpr& e,
                                                                   std::uint32_t m) -> bool {
        using K = BoolExpr::Kind;
        switch (e.kind) {
            case K::True: return true;
            case K::False: return false;
            case K::Var: return (m >> bit.at(e.var)) & 1u;
            case K::And: return eval(*e.lhs, m) && eval(*e.rhs, m);
            case K::Not: return !eval(*e.lhs, m);
            case K::TagEq: return tag_of(e.se1) == tag_of(e.se2);
            default: throw std::logic_error("fragment contains a non-Boolean test");
        }
    };
    std::function<std::uint32_t(const Stmt&, std::uint32_t)> run = [&](const Stmt& s,
                                                                       std::uint32_t m) -> std::uint32_t {
        using K = Stmt::Kind;
        switch (s.kind) {
            case K::Skip: return m;
            case K::Block: return run(*s.a, m);
            case K::Seq: return run(*s.b, run(*s.a, m));
            case K::BoolAssign: {
                std::uint32_t b = 1u << bit.at(s.var);
                return eval(*s.bexpr, m) ? (m | b) : (m & ~b);
            }
            case K::If: return eval(*s.bexpr, m) ? run(*s.a, m) : run(*s.b, m);
            default: throw std::logic_error("fragment contains a non-Boolean statement");
        }
    };
    return run(*stmt, mask);
}

/// A state transformation, tabulated over all masks.
using MaskFn = std::vector<std::uint8_t>;

inline MaskFn identity_fn(std::size_t size) {
    MaskFn f(size);
    for (std::size_t i = 0; i < size; ++i) f[i] = static_cast<std::uint8_t>(i);
    return f;
}

inline MaskFn compose_then(const MaskFn& first, const MaskFn& then) {
    MaskFn out(first.size());
    for (std::size_t i = 0; i < first.size(); ++i) out[i] = then[first[i]];
    return out;
}

inline MaskFn tabulate(const BoolSpace& space, const StmtPtr& stmt, const std::string& outer_var,
                       const std::string& inner_var, const Tag& outer_tag, const Tag& inner_tag) {
    MaskFn f(space.size());
    for (std::size_t m = 0; m < space.size(); ++m)
        f[m] = static_cast<std::uint8_t>(apply_fragment(space, stmt, static_cast<std::uint32_t>(m),
                                                        outer_var, inner_var, outer_tag, inner_tag));
    return f;
}

inline bool fragment_reads_own_tag(const StmtPtr& s, const std::string& outer_var) {
    if (!s) return false;
    std::function<bool(const BoolExpr&)> eb = [&](const BoolExpr& e) -> bool {
        using K = BoolExpr::Kind;
        switch (e.kind) {
            case K::And: return eb(*e.lhs) || eb(*e.rhs);
            case K::Not: return eb(*e.lhs);
            case K::TagEq:
                return (!e.se1.is_const && e.se1.index.var == outer_var) ||
                       (!e.se2.is_const && e.se2.index.var == outer_var);
            default: return false;
        }
    };
    std::function<bool(const Stmt&)> es = [&](const Stmt& st) -> bool {
        using K = Stmt::Kind;
        switch (st.kind) {
            case K::Block: return st.a && es(*st.a);
            case K::Seq: return es(*st.a) || es(*st.b);
            case K::BoolAssign: return eb(*st.bexpr);
            case K::If: return eb(*st.bexpr) || es(*st.a) || es(*st.b);
            default: return false;
        }
    };
    return es(*s);
}

/// Everything the translation computes besides the automaton itself.
struct Nd2Translation {
    BoolSpace space;
    bool own_tag_dependent = false;      // inner fragments read A[i].s
    std::vector<Tag> tracks;             // per-track owner tags ("*" when collapsed)
    std::map<Tag, std::vector<MaskFn>> monoid;       // per track: sweep functions
    std::map<Tag, std::map<MaskFn, std::size_t>> fn_id; // per track
    std::map<Tag, Tag> track_of;         // position tag -> track key
};

const std::size_t kMonoidLimit = 4096;
const std::size_t kConditionStateLimit = 200000;

} // namespace detail

/// Builds a class automaton accepting exactly the arrays that drive the
/// program into one of the target Boolean states.
///
/// The transducer threads the Boolean state between outer iterations and, at
/// each position, guesses the full inner-sweep transformation for that
/// position's iteration; the emitted letter carries the position's tag and
/// the guess. Each class condition composes the true sweep transformation
/// from the per-position fragment effects and checks that all of its in-class
/// guesses name exactly that function, one track per owning tag when the
/// inner fragments read A[i].s.
inline ClassAutomaton nd2_to_class_automaton(const Program& prog,
                                             const std::vector<BooleanState>& targets) {
    Nd2Shape shape = is_restricted_nd2(prog);
    if (!shape.ok)
        throw std::invalid_argument("translation requires the two-loop shape: " +
                                    (shape.violations.empty() ? std::string("no shape")
                                                              : shape.violations.front()));

    detail::BoolSpace space(prog.bool_vars);
    const std::size_t S = space.size();

    // Fragment effects. P1/P4 never read the inner position (checked).
    std::map<Tag, detail::MaskFn> p1_fn, p4_fn;
    for (const Tag& t : prog.sigma) {
        p1_fn[t] = detail::tabulate(space, shape.p1, shape.outer_var, shape.inner_var, t, t);
        p4_fn[t] = detail::tabulate(space, shape.p4, shape.outer_var, shape.inner_var, t, t);
    }

    bool own_dep = detail::fragment_reads_own_tag(shape.p2, shape.outer_var) ||
                   detail::fragment_reads_own_tag(shape.p3, shape.outer_var);
    std::vector<Tag> tracks = own_dep ? prog.sigma : std::vector<Tag>{prog.sigma.front()};
    auto track_key = [&](const Tag& t) { return own_dep ? t : tracks.front(); };

    // Per-track atoms: the inner-body effect at a position tagged t_pos, for
    // a sweep owned by a position tagged t_own, in and out of class.
    std::map<Tag, std::map<Tag, detail::MaskFn>> in_atom, out_atom;
    for (const Tag& t_own : tracks)
        for (const Tag& t_pos : prog.sigma) {
            in_atom[t_own][t_pos] = detail::tabulate(space, shape.p2, shape.outer_var,
                                                     shape.inner_var, t_own, t_pos);
            out_atom[t_own][t_pos] = detail::tabulate(space, shape.p3, shape.outer_var,
                                                      shape.inner_var, t_own, t_pos);
        }

    // Per-track monoid closure; ids in discovery order.
    std::map<Tag, std::vector<detail::MaskFn>> monoid;
    std::map<Tag, std::map<detail::MaskFn, std::size_t>> fn_id;
    for (const Tag& t_own : tracks) {
        std::vector<detail::MaskFn>& elems = monoid[t_own];
        std::map<detail::MaskFn, std::size_t>& ids = fn_id[t_own];
        auto add = [&](const detail::MaskFn& f) {
            if (ids.emplace(f, elems.size()).second) elems.push_back(f);
        };
        add(detail::identity_fn(S));
        for (std::size_t i = 0; i < elems.size(); ++i) {
            detail::MaskFn cur = elems[i];
            for (const Tag& t_pos : prog.sigma) {
                add(detail::compose_then(cur, in_atom[t_own][t_pos]));
                add(detail::compose_then(cur, out_atom[t_own][t_pos]));
            }
            if (elems.size() > detail::kMonoidLimit)
                throw std::invalid_argument("translation blow-up: sweep monoid too large");
        }
    }

    // Output letters: tag + claimed sweep function of that tag's track.
    auto letter_name = [&](const Tag& t, std::size_t h) {
        return t + ".m" + std::to_string(h);
    };
    std::vector<Tag> gamma;
    for (const Tag& t : prog.sigma)
        for (std::size_t h = 0; h < monoid[track_key(t)].size(); ++h)
            gamma.push_back(letter_name(t, h));

    // Transducer: thread the Boolean state, guessing the sweep per position.
    Transducer trans;
    trans.input_alphabet = prog.sigma;
    trans.output_alphabet = gamma;
    auto u_name = [](std::uint32_t mask) { return "u" + std::to_string(mask); };
    std::set<std::uint32_t> reached{0};
    std::vector<std::uint32_t> queue{0};
    trans.initial = u_name(0);
    trans.states.insert(trans.initial);
    while (!queue.empty()) {
        std::uint32_t u = queue.back();
        queue.pop_back();
        for (const Tag& t : prog.sigma) {
            std::uint32_t in = p1_fn[t][u];
            const auto& elems = monoid[track_key(t)];
            for (std::size_t h = 0; h < elems.size(); ++h) {
                std::uint32_t out = elems[h][in];
                std::uint32_t u_next = p4_fn[t][out];
                trans.add_transition(u_name(u), t, letter_name(t, h), u_name(u_next));
                if (reached.insert(u_next).second) queue.push_back(u_next);
            }
        }
    }
    for (const BooleanState& target : targets) {
        std::uint32_t mask = space.to_mask(target);
        State name = u_name(mask);
        trans.states.insert(name); // the target may be unreachable; keep it a valid state
        trans.accepting.insert(name);
    }

    // Class condition: per track, the composed transformation so far and the
    // claim to verify at the end; inconsistent claims fall into a sink.
    struct CondState {
        std::vector<std::size_t> fn;     // per track
        std::vector<std::size_t> claim;  // per track; npos = none yet
        auto operator<=>(const CondState&) const = default;
    };
    const std::size_t npos = static_cast<std::size_t>(-1);

    ClassDfa cond;
    cond.alphabet = marked_alphabet(gamma);
    const State rej = "rej";
    cond.states.insert(rej);
    for (const MarkedLetter& l : cond.alphabet) cond.delta[{rej, l}] = rej;

    std::map<CondState, State> cond_names;
    std::vector<CondState> cond_queue;
    auto cond_name = [&](const CondState& cs) {
        std::string name = "q";
        for (std::size_t k = 0; k < cs.fn.size(); ++k) {
            name += "|" + tracks[k] + ".f" + std::to_string(cs.fn[k]) + "c" +
                    (cs.claim[k] == npos ? "-" : std::to_string(cs.claim[k]));
        }
        return name;
    };
    auto cond_intern = [&](const CondState& cs) {
        auto it = cond_names.find(cs);
        if (it != cond_names.end()) return it->second;
        State name = cond_name(cs);
        cond_names.emplace(cs, name);
        cond.states.insert(name);
        cond_queue.push_back(cs);
        if (cond.states.size() > detail::kConditionStateLimit)
            throw std::invalid_argument("translation blow-up: condition too large");
        return name;
    };

    CondState init;
    init.fn.assign(tracks.size(), 0); // identity has id 0
    init.claim.assign(tracks.size(), npos);
    cond.initial = cond_intern(init);

    std::map<Tag, std::size_t> track_index;
    for (std::size_t k = 0; k < tracks.size(); ++k) track_index[tracks[k]] = k;

    for (std::size_t qi = 0; qi < cond_queue.size(); ++qi) {
        CondState cs = cond_queue[qi];
        State src = cond_names.at(cs);
        for (const Tag& t : prog.sigma) {
            const auto& elems_t = monoid[track_key(t)];
            for (std::size_t h = 0; h < elems_t.size(); ++h) {
                Tag letter = letter_name(t, h);
                for (bool marked : {false, true}) {
                    CondState next = cs;
                    for (std::size_t k = 0; k < tracks.size(); ++k) {
                        const detail::MaskFn& atom =
                            marked ? in_atom[tracks[k]][t] : out_atom[tracks[k]][t];
                        next.fn[k] = fn_id[tracks[k]].at(
                            detail::compose_then(monoid[tracks[k]][cs.fn[k]], atom));
                    }
                    bool dead = false;
                    if (marked) {
                        std::size_t k = track_index.at(track_key(t));
                        if (cs.claim[k] == npos)
                            next.claim[k] = h;
                        else if (cs.claim[k] != h)
                            dead = true;
                    }
                    cond.delta[{src, MarkedLetter{letter, marked}}] =
                        dead ? rej : cond_intern(next);
                }
            }
        }
    }
    for (const auto& [cs, name] : cond_names) {
        bool ok = true;
        for (std::size_t k = 0; k < tracks.size(); ++k)
            if (cs.claim[k] != npos && cs.claim[k] != cs.fn[k]) ok = false;
        if (ok) cond.accepting.insert(name);
    }

    cond.validate();
    return ClassAutomaton{std::move(trans), std::move(cond)};
}

inline ClassAutomaton nd2_to_class_automaton(const Program& prog, const BooleanState& target) {
    return nd2_to_class_automaton(prog, std::vector<BooleanState>{target});
}

// --- bounded reachability -----------------------------------------------------

/// Conditions at most this large (after minimization) go through the counter
/// machine; larger ones are decided by direct membership on the class
/// automaton, which computes the same bounded language.
inline constexpr std::size_t kPmaConditionStateLimit = 12;

struct ReachResult {
    bool restricted = false;
    bool zero_priority_syntax = false;
    bool condition_zero_priority = false;
    std::string path; // "pma-explore", "pca-membership", or "interpreter"
    std::optional<DataWord> witness;
};

/// Pipeline: translate to a class automaton, check its condition for
/// 0-priority, and search canonical arrays up to max_len. When the condition
/// is 0-priority the search is automaton-based (through the compiled counter
/// machine when small enough, by direct membership otherwise); every witness
/// is replayed through the interpreter before it is returned.
inline ReachResult reachable(const Program& prog, const std::vector<BooleanState>& targets,
                             std::size_t max_len) {
    ReachResult result;
    Nd2Shape shape = is_restricted_nd2(prog);
    result.restricted = shape.ok;
    if (!shape.ok)
        throw std::invalid_argument("reachability requires the two-loop shape: " +
                                    (shape.violations.empty() ? std::string("no shape")
                                                              : shape.violations.front()));
    result.zero_priority_syntax = is_zero_priority_nd2(prog, shape).ok;

    ClassAutomaton ca = nd2_to_class_automaton(prog, targets);
    PriorityVerdict verdict = decide_zero_priority(ca.class_condition);
    result.condition_zero_priority = verdict.is_zero_priority;
    if (result.zero_priority_syntax && !verdict.is_zero_priority)
        throw std::logic_error("syntactically 0-priority program produced a non-0-priority condition");

    auto reaches_target = [&](const DataWord& arr) {
        BooleanState fin = final_booleans(prog, arr);
        return std::any_of(targets.begin(), targets.end(),
                           [&](const BooleanState& t) { return t == fin; });
    };

    if (verdict.is_zero_priority) {
        ClassDfa small = minimize(ca.class_condition);
        PriorityVerdict small_verdict = decide_zero_priority(small);
        if (small.states.size() <= kPmaConditionStateLimit && small_verdict.is_zero_priority) {
            result.path = "pma-explore";
            Pca pca{ca.transducer,
                    {PcaCondition{ca.transducer.output_alphabet, small, *small_verdict.ordering}}};
            PmaBuild build = pca_to_pma(pca);
            std::size_t depth = build.scc_depths.empty() ? 0 : *std::max_element(
                                    build.scc_depths.begin(), build.scc_depths.end());
            BoundedLanguage lang =
                explore(build.pma.machine, max_len, max_len + depth + 1,
                        drain_step_budget(max_len, build.pma.machine.counter_count));
            DataWordEnumerator en(prog.sigma, max_len);
            while (auto dw = en.next()) {
                if (!lang.contains(dw->tags())) continue;
                if (reaches_target(*dw)) {
                    result.witness = *dw;
                    break;
                }
            }
            return result;
        }
        result.path = "pca-membership";
        Pca pca{ca.transducer,
                {PcaCondition{ca.transducer.output_alphabet, ca.class_condition, *verdict.ordering}}};
        result.witness = bounded_nonempty(pca, max_len);
        if (result.witness && !reaches_target(*result.witness))
            throw std::logic_error("automaton witness does not replay to the target");
        return result;
    }

    result.path = "interpreter";
    DataWordEnumerator en(prog.sigma, max_len);
    while (auto dw = en.next()) {
        if (reaches_target(*dw)) {
            result.witness = *dw;
            break;
        }
    }
    return result;
}

inline ReachResult reachable(const Program& prog, const BooleanState& target, std::size_t max_len) {
    return reachable(prog, std::vector<BooleanState>{target}, max_len);
}

} // namespace pca
