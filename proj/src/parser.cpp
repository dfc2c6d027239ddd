#include "wellform/parser.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "wellform/expr.hpp"

namespace wellform {

namespace {

enum class Tok {
    Ident,
    String,
    Int,
    HashInt,
    Arrow,
    LBrace,
    RBrace,
    Comma,
    Terminator,  // ';' or end of line
    Eof,
};

struct Token {
    Tok kind = Tok::Eof;
    std::string text;
    long value = 0;
    int line = 1;
    int column = 1;
};

struct LexOutput {
    std::vector<Token> tokens;
    std::vector<std::string> lines;
    bool failed = false;
    ParseError error;
};

LexOutput lex(const std::string& input) {
    LexOutput out;
    {
        std::string line;
        for (char c : input) {
            if (c == '\n') {
                out.lines.push_back(line);
                line.clear();
            } else {
                line.push_back(c);
            }
        }
        out.lines.push_back(line);
    }

    int line = 1;
    int col = 1;
    std::size_t i = 0;
    auto fail = [&](const std::string& message) {
        out.failed = true;
        out.error = {line, col, message,
                     line - 1 < static_cast<int>(out.lines.size()) ? out.lines[line - 1] : ""};
        return out;
    };
    auto push = [&](Tok kind, std::string text, long value, int tline, int tcol) {
        out.tokens.push_back({kind, std::move(text), value, tline, tcol});
    };

    while (i < input.size()) {
        char c = input[i];
        if (c == '\n') {
            push(Tok::Terminator, "\n", 0, line, col);
            line++;
            col = 1;
            i++;
            continue;
        }
        if (c == ' ' || c == '\t' || c == '\r') {
            i++;
            col++;
            continue;
        }
        int tline = line;
        int tcol = col;
        if (c == '#') {
            if (i + 1 < input.size() && std::isdigit(static_cast<unsigned char>(input[i + 1]))) {
                i++;
                col++;
                long value = 0;
                while (i < input.size() && std::isdigit(static_cast<unsigned char>(input[i]))) {
                    value = value * 10 + (input[i] - '0');
                    i++;
                    col++;
                }
                push(Tok::HashInt, "#" + std::to_string(value), value, tline, tcol);
            } else {
                while (i < input.size() && input[i] != '\n') {
                    i++;
                    col++;
                }
            }
            continue;
        }
        if (c == ';') {
            push(Tok::Terminator, ";", 0, tline, tcol);
            i++;
            col++;
            continue;
        }
        if (c == '{') {
            push(Tok::LBrace, "{", 0, tline, tcol);
            i++;
            col++;
            continue;
        }
        if (c == '}') {
            push(Tok::RBrace, "}", 0, tline, tcol);
            i++;
            col++;
            continue;
        }
        if (c == ',') {
            push(Tok::Comma, ",", 0, tline, tcol);
            i++;
            col++;
            continue;
        }
        if (c == '-') {
            if (i + 1 < input.size() && input[i + 1] == '>') {
                push(Tok::Arrow, "->", 0, tline, tcol);
                i += 2;
                col += 2;
                continue;
            }
            if (i + 1 < input.size() && std::isdigit(static_cast<unsigned char>(input[i + 1]))) {
                i++;
                col++;
                long value = 0;
                while (i < input.size() && std::isdigit(static_cast<unsigned char>(input[i]))) {
                    value = value * 10 + (input[i] - '0');
                    i++;
                    col++;
                }
                push(Tok::Int, std::to_string(-value), -value, tline, tcol);
                continue;
            }
            return fail("unexpected character '-'");
        }
        if (c == '"') {
            i++;
            col++;
            std::string text;
            bool closed = false;
            while (i < input.size()) {
                char d = input[i];
                if (d == '"') {
                    closed = true;
                    i++;
                    col++;
                    break;
                }
                if (d == '\n') break;
                if (d == '\\' && i + 1 < input.size()) {
                    char e = input[i + 1];
                    if (e == '"' || e == '\\') {
                        text.push_back(e);
                    } else if (e == 'n') {
                        text.push_back('\n');
                    } else if (e == 't') {
                        text.push_back('\t');
                    } else {
                        text.push_back(e);
                    }
                    i += 2;
                    col += 2;
                    continue;
                }
                text.push_back(d);
                i++;
                col++;
            }
            if (!closed) return fail("unterminated string");
            push(Tok::String, std::move(text), 0, tline, tcol);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            long value = 0;
            while (i < input.size() && std::isdigit(static_cast<unsigned char>(input[i]))) {
                value = value * 10 + (input[i] - '0');
                i++;
                col++;
            }
            push(Tok::Int, std::to_string(value), value, tline, tcol);
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string text;
            while (i < input.size() &&
                   (std::isalnum(static_cast<unsigned char>(input[i])) || input[i] == '_')) {
                text.push_back(input[i]);
                i++;
                col++;
            }
            push(Tok::Ident, std::move(text), 0, tline, tcol);
            continue;
        }
        return fail(std::string("unexpected character '") + c + "'");
    }

    int eof_line = static_cast<int>(out.lines.size());
    int eof_col = static_cast<int>(out.lines.back().size()) + 1;
    push(Tok::Eof, "", 0, eof_line, eof_col);
    return out;
}

class Cursor {
  public:
    Cursor(const LexOutput& lexed) : lexed_(lexed) {}

    const Token& peek() const { return lexed_.tokens[index_]; }

    const Token& next() {
        const Token& t = lexed_.tokens[index_];
        if (t.kind != Tok::Eof) index_++;
        return t;
    }

    bool at(Tok kind) const { return peek().kind == kind; }

    void skip_terminators() {
        while (at(Tok::Terminator)) next();
    }

    ParseError make_error(const Token& at, const std::string& message) const {
        std::string snippet;
        if (at.line - 1 < static_cast<int>(lexed_.lines.size())) {
            snippet = lexed_.lines[at.line - 1];
        }
        return {at.line, at.column, message, snippet};
    }

    // The statement ends at ';', end of line, '}' or end of input.
    bool finish_statement(ParseError& error) {
        if (at(Tok::Terminator)) {
            skip_terminators();
            return true;
        }
        if (at(Tok::RBrace) || at(Tok::Eof)) return true;
        error = make_error(peek(), "expected end of statement, got '" + peek().text + "'");
        return false;
    }

  private:
    const LexOutput& lexed_;
    std::size_t index_ = 0;
};

struct ActivityParser {
    Cursor& cur;
    ParseError error;

    bool expect_ident(std::string& out) {
        if (!cur.at(Tok::Ident)) {
            error = cur.make_error(cur.peek(), "expected identifier");
            return false;
        }
        out = cur.next().text;
        return true;
    }

    bool expect_string(std::string& out, const char* what) {
        if (!cur.at(Tok::String)) {
            error = cur.make_error(cur.peek(), std::string("expected quoted ") + what);
            return false;
        }
        out = cur.next().text;
        return true;
    }

    bool expect_keyword(const char* word) {
        if (!cur.at(Tok::Ident) || cur.peek().text != word) {
            error = cur.make_error(cur.peek(), std::string("expected '") + word + "'");
            return false;
        }
        cur.next();
        return true;
    }

    bool check_expression(const std::string& text, const Token& at, const char* what) {
        auto parsed = parse_expression(text);
        if (!parsed.ok()) {
            error = cur.make_error(at, std::string("malformed ") + what + " \"" + text +
                                           "\": " + parsed.error.message);
            return false;
        }
        return true;
    }

    bool parse_body(ActivityGraph& graph);

    bool add_node(ActivityGraph& graph, Node node, const Token& id_token) {
        for (const Node& existing : graph.nodes) {
            if (existing.id == node.id) {
                error = cur.make_error(id_token, "duplicate id '" + node.id + "'");
                return false;
            }
        }
        graph.nodes.push_back(std::move(node));
        return true;
    }
};

std::string make_edge_id(const ActivityGraph& graph, const std::string& source,
                         const std::string& target) {
    std::string base = source + "->" + target;
    int count = 1;
    for (const Edge& e : graph.edges) {
        if (e.source == source && e.target == target) count++;
    }
    if (count == 1) return base;
    return base + "~" + std::to_string(count);
}

bool ActivityParser::parse_body(ActivityGraph& graph) {
    for (;;) {
        cur.skip_terminators();
        if (cur.at(Tok::RBrace)) return true;
        if (cur.at(Tok::Eof)) {
            error = cur.make_error(cur.peek(), "unclosed block: expected '}'");
            return false;
        }
        const Token& kw = cur.peek();
        if (kw.kind != Tok::Ident) {
            error = cur.make_error(kw, "expected statement, got '" + kw.text + "'");
            return false;
        }
        std::string word = kw.text;
        if (word == "start" || word == "end" || word == "flowfinal" || word == "decision" ||
            word == "merge" || word == "fork" || word == "join") {
            cur.next();
            const Token& id_token = cur.peek();
            Node node;
            if (!expect_ident(node.id)) return false;
            if (word == "start") node.kind = NodeKind::Initial;
            else if (word == "end") node.kind = NodeKind::ActivityFinal;
            else if (word == "flowfinal") node.kind = NodeKind::FlowFinal;
            else if (word == "decision") node.kind = NodeKind::Decision;
            else if (word == "merge") node.kind = NodeKind::Merge;
            else if (word == "fork") node.kind = NodeKind::Fork;
            else node.kind = NodeKind::Join;
            if (!add_node(graph, std::move(node), id_token)) return false;
        } else if (word == "action") {
            cur.next();
            const Token& id_token = cur.peek();
            Node node;
            node.kind = NodeKind::Action;
            if (!expect_ident(node.id)) return false;
            if (!expect_string(node.label, "label")) return false;
            if (cur.at(Tok::Ident) && cur.peek().text == "effect") {
                cur.next();
                const Token& effect_token = cur.peek();
                if (!expect_string(node.effect, "effect")) return false;
                auto assignments = parse_assignments(node.effect);
                if (!assignments.ok()) {
                    error = cur.make_error(effect_token, "malformed effect \"" + node.effect +
                                                            "\": " + assignments.error.message);
                    return false;
                }
            }
            if (!add_node(graph, std::move(node), id_token)) return false;
        } else if (word == "loopnode") {
            cur.next();
            const Token& id_token = cur.peek();
            Node node;
            node.kind = NodeKind::LoopNode;
            if (!expect_ident(node.id)) return false;
            if (!expect_string(node.label, "label")) return false;
            if (!cur.at(Tok::LBrace)) {
                error = cur.make_error(cur.peek(), "expected '{' after loopnode header");
                return false;
            }
            cur.next();
            ActivityGraph body;
            body.name = node.id;
            if (!parse_body(body)) return false;
            cur.next();  // consume '}'
            node.body.push_back(std::move(body));
            if (!add_node(graph, std::move(node), id_token)) return false;
        } else if (word == "flow") {
            cur.next();
            Edge edge;
            if (!expect_ident(edge.source)) return false;
            if (!cur.at(Tok::Arrow)) {
                error = cur.make_error(cur.peek(), "expected '->' in flow");
                return false;
            }
            cur.next();
            if (!expect_ident(edge.target)) return false;
            if (cur.at(Tok::Ident) && cur.peek().text == "guard") {
                cur.next();
                const Token& guard_token = cur.peek();
                if (!expect_string(edge.guard, "guard")) return false;
                if (!check_expression(edge.guard, guard_token, "guard")) return false;
            }
            edge.id = make_edge_id(graph, edge.source, edge.target);
            graph.edges.push_back(std::move(edge));
        } else if (word == "annot") {
            cur.next();
            ControlAnnotation annot;
            if (!cur.at(Tok::Ident)) {
                error = cur.make_error(cur.peek(), "expected construct (if/while/dowhile/for)");
                return false;
            }
            std::string construct = cur.next().text;
            if (construct == "if") annot.construct = ControlConstruct::If;
            else if (construct == "while") annot.construct = ControlConstruct::While;
            else if (construct == "dowhile") annot.construct = ControlConstruct::DoWhile;
            else if (construct == "for") annot.construct = ControlConstruct::For;
            else {
                error = cur.make_error(cur.peek(), "unknown construct '" + construct + "'");
                return false;
            }
            if (!cur.at(Tok::HashInt)) {
                error = cur.make_error(cur.peek(), "expected '#<number>' after construct");
                return false;
            }
            const Token& number_token = cur.next();
            annot.number = static_cast<int>(number_token.value);
            if (annot.number <= 0) {
                error = cur.make_error(number_token, "annotation number must be positive");
                return false;
            }
            if (!expect_keyword("open")) return false;
            if (!expect_ident(annot.open_node)) return false;
            if (!expect_keyword("close")) return false;
            if (!expect_ident(annot.close_node)) return false;
            if (!expect_keyword("cond")) return false;
            const Token& cond_token = cur.peek();
            if (!expect_string(annot.condition, "condition")) return false;
            if (!check_expression(annot.condition, cond_token, "condition")) return false;
            graph.annotations.push_back(std::move(annot));
        } else {
            error = cur.make_error(kw, "unknown keyword '" + word + "'");
            return false;
        }
        if (!cur.finish_statement(error)) return false;
    }
}

}  // namespace

Parsed<ActivityGraph> parse_activity(const std::string& input) {
    LexOutput lexed = lex(input);
    if (lexed.failed) return lexed.error;
    Cursor cur(lexed);
    ActivityParser parser{cur, {}};

    cur.skip_terminators();
    if (!parser.expect_keyword("activity")) return parser.error;
    ActivityGraph graph;
    if (!parser.expect_string(graph.name, "diagram name")) return parser.error;
    if (!cur.at(Tok::LBrace)) {
        return cur.make_error(cur.peek(), "expected '{' after diagram name");
    }
    cur.next();
    if (!parser.parse_body(graph)) return parser.error;
    cur.next();  // consume '}'
    cur.skip_terminators();
    if (!cur.at(Tok::Eof)) {
        return cur.make_error(cur.peek(), "unexpected input after closing '}'");
    }
    return graph;
}

namespace {

struct SequenceParser {
    Cursor& cur;
    ParseError error;
    SequenceModel model;
    int fragment_counter = 0;

    bool expect_ident(std::string& out) {
        if (!cur.at(Tok::Ident)) {
            error = cur.make_error(cur.peek(), "expected identifier");
            return false;
        }
        out = cur.next().text;
        return true;
    }

    bool expect_string(std::string& out, const char* what) {
        if (!cur.at(Tok::String)) {
            error = cur.make_error(cur.peek(), std::string("expected quoted ") + what);
            return false;
        }
        out = cur.next().text;
        return true;
    }

    bool lifeline_declared(const std::string& id) const {
        for (const Lifeline& l : model.lifelines) {
            if (l.id == id) return true;
        }
        return false;
    }

    // depth 0 = top level; inside_alt enables 'operand' separators.
    bool parse_items(bool top_level, FragmentKind enclosing, std::vector<Span>* operand_spans);
};

bool SequenceParser::parse_items(bool top_level, FragmentKind enclosing,
                                 std::vector<Span>* operand_spans) {
    int operand_start = static_cast<int>(model.events.size());
    for (;;) {
        cur.skip_terminators();
        if (cur.at(Tok::RBrace)) {
            if (top_level) {
                error = cur.make_error(cur.peek(), "unmatched '}'");
                return false;
            }
            if (operand_spans) {
                int last = static_cast<int>(model.events.size()) - 1;
                if (last < operand_start) {
                    error = cur.make_error(cur.peek(), "empty alt operand");
                    return false;
                }
                operand_spans->push_back({operand_start, last});
            }
            return true;
        }
        if (cur.at(Tok::Eof)) {
            if (!top_level) {
                error = cur.make_error(cur.peek(), "unclosed fragment block: expected '}'");
                return false;
            }
            return true;
        }
        const Token& kw = cur.peek();
        if (kw.kind != Tok::Ident) {
            error = cur.make_error(kw, "expected statement, got '" + kw.text + "'");
            return false;
        }
        std::string word = kw.text;
        if (word == "lifeline") {
            cur.next();
            Lifeline lifeline;
            const Token& id_token = cur.peek();
            if (!expect_ident(lifeline.id)) return false;
            if (lifeline_declared(lifeline.id)) {
                error = cur.make_error(id_token, "duplicate lifeline '" + lifeline.id + "'");
                return false;
            }
            if (!expect_string(lifeline.label, "label")) return false;
            model.lifelines.push_back(std::move(lifeline));
        } else if (word == "msg") {
            cur.next();
            MessageEvent event;
            const Token& id_token = cur.peek();
            if (!expect_ident(event.id)) return false;
            for (const MessageEvent& existing : model.events) {
                if (existing.id == event.id) {
                    error = cur.make_error(id_token, "duplicate id '" + event.id + "'");
                    return false;
                }
            }
            const Token& from_token = cur.peek();
            if (!expect_ident(event.from)) return false;
            if (!lifeline_declared(event.from)) {
                error = cur.make_error(from_token, "undeclared lifeline '" + event.from + "'");
                return false;
            }
            if (!cur.at(Tok::Arrow)) {
                error = cur.make_error(cur.peek(), "expected '->' in msg");
                return false;
            }
            cur.next();
            const Token& to_token = cur.peek();
            if (!expect_ident(event.to)) return false;
            if (!lifeline_declared(event.to)) {
                error = cur.make_error(to_token, "undeclared lifeline '" + event.to + "'");
                return false;
            }
            if (!expect_string(event.label, "label")) return false;
            if (!cur.at(Tok::Ident)) {
                error = cur.make_error(cur.peek(), "expected message kind (sync/async/reply)");
                return false;
            }
            const Token& kind_token = cur.next();
            if (kind_token.text == "sync") event.kind = MessageKind::Sync;
            else if (kind_token.text == "async") event.kind = MessageKind::Async;
            else if (kind_token.text == "reply") event.kind = MessageKind::Reply;
            else {
                error = cur.make_error(kind_token,
                                       "unknown message kind '" + kind_token.text + "'");
                return false;
            }
            event.order = static_cast<int>(model.events.size());
            model.events.push_back(std::move(event));
        } else if (word == "fragment") {
            cur.next();
            Fragment fragment;
            if (!cur.at(Tok::Ident)) {
                error = cur.make_error(cur.peek(), "expected fragment kind (alt/opt/loop/par)");
                return false;
            }
            const Token& kind_token = cur.next();
            if (kind_token.text == "alt") fragment.kind = FragmentKind::Alt;
            else if (kind_token.text == "opt") fragment.kind = FragmentKind::Opt;
            else if (kind_token.text == "loop") fragment.kind = FragmentKind::Loop;
            else if (kind_token.text == "par") fragment.kind = FragmentKind::Par;
            else {
                error = cur.make_error(kind_token,
                                       "unknown fragment kind '" + kind_token.text + "'");
                return false;
            }
            if (!cur.at(Tok::HashInt)) {
                error = cur.make_error(cur.peek(), "expected '#<number>' after fragment kind");
                return false;
            }
            const Token& number_token = cur.next();
            fragment.number = static_cast<int>(number_token.value);
            if (fragment.number <= 0) {
                error = cur.make_error(number_token, "fragment number must be positive");
                return false;
            }
            if (!cur.at(Tok::Ident) || cur.peek().text != "cond") {
                error = cur.make_error(cur.peek(), "expected 'cond'");
                return false;
            }
            cur.next();
            const Token& cond_token = cur.peek();
            if (!expect_string(fragment.condition, "condition")) return false;
            if (fragment.kind != FragmentKind::Par && !fragment.condition.empty()) {
                auto parsed = parse_expression(fragment.condition);
                if (!parsed.ok()) {
                    error = cur.make_error(cond_token, "malformed condition \"" +
                                                          fragment.condition +
                                                          "\": " + parsed.error.message);
                    return false;
                }
            }
            if (!cur.at(Tok::LBrace)) {
                error = cur.make_error(cur.peek(), "expected '{' after fragment header");
                return false;
            }
            const Token& open_token = cur.next();
            int span_start = static_cast<int>(model.events.size());
            std::vector<Span> operands;
            bool is_alt = fragment.kind == FragmentKind::Alt;
            if (!parse_items(false, fragment.kind, is_alt ? &operands : nullptr)) return false;
            cur.next();  // consume '}'
            int span_end = static_cast<int>(model.events.size()) - 1;
            if (span_end < span_start) {
                error = cur.make_error(open_token, "fragment contains no messages");
                return false;
            }
            fragment.span = {span_start, span_end};
            if (is_alt) fragment.operands = std::move(operands);
            fragment_counter++;
            fragment.id = "frag" + std::to_string(fragment_counter);
            model.fragments.push_back(std::move(fragment));
        } else if (word == "operand") {
            if (top_level || enclosing != FragmentKind::Alt || !operand_spans) {
                error = cur.make_error(kw, "'operand' is only valid inside an alt fragment");
                return false;
            }
            cur.next();
            std::string condition;
            if (!expect_string(condition, "operand condition")) return false;
            int last = static_cast<int>(model.events.size()) - 1;
            if (last < operand_start) {
                error = cur.make_error(kw, "empty alt operand");
                return false;
            }
            operand_spans->push_back({operand_start, last});
            operand_start = static_cast<int>(model.events.size());
        } else {
            error = cur.make_error(kw, "unknown keyword '" + word + "'");
            return false;
        }
        if (!cur.finish_statement(error)) return false;
    }
}

}  // namespace

Parsed<SequenceModel> parse_sequence(const std::string& input) {
    LexOutput lexed = lex(input);
    if (lexed.failed) return lexed.error;
    Cursor cur(lexed);
    SequenceParser parser{cur, {}, {}, 0};

    cur.skip_terminators();
    if (!cur.at(Tok::Ident) || cur.peek().text != "sequence") {
        return cur.make_error(cur.peek(), "expected 'sequence'");
    }
    cur.next();
    if (!parser.expect_string(parser.model.name, "diagram name")) return parser.error;
    if (!cur.at(Tok::LBrace)) {
        return cur.make_error(cur.peek(), "expected '{' after diagram name");
    }
    cur.next();
    if (!parser.parse_items(false, FragmentKind::Par, nullptr)) return parser.error;
    cur.next();  // consume '}'
    cur.skip_terminators();
    if (!cur.at(Tok::Eof)) {
        return cur.make_error(cur.peek(), "unexpected input after closing '}'");
    }
    return std::move(parser.model);
}

Parsed<Rubric> parse_rubric(const std::string& input) {
    LexOutput lexed = lex(input);
    if (lexed.failed) return lexed.error;
    Cursor cur(lexed);
    ParseError error;

    cur.skip_terminators();
    if (!cur.at(Tok::Ident) || cur.peek().text != "rubric") {
        return cur.make_error(cur.peek(), "expected 'rubric'");
    }
    cur.next();
    Rubric rubric;
    if (!cur.at(Tok::String)) {
        return cur.make_error(cur.peek(), "expected quoted rubric name");
    }
    rubric.name = cur.next().text;
    if (!cur.at(Tok::Ident) || cur.peek().text != "mode") {
        return cur.make_error(cur.peek(), "expected 'mode'");
    }
    cur.next();
    if (!cur.at(Tok::Ident)) {
        return cur.make_error(cur.peek(), "expected rubric mode");
    }
    const Token& mode_token = cur.next();
    if (mode_token.text == "element_diff") rubric.mode = RubricMode::ElementDiff;
    else if (mode_token.text == "annotation") rubric.mode = RubricMode::Annotation;
    else if (mode_token.text == "hotspot") rubric.mode = RubricMode::Hotspot;
    else if (mode_token.text == "placement") rubric.mode = RubricMode::Placement;
    else {
        return cur.make_error(mode_token, "unknown mode '" + mode_token.text + "'");
    }
    if (!cur.at(Tok::LBrace)) {
        return cur.make_error(cur.peek(), "expected '{' after mode");
    }
    cur.next();

    for (;;) {
        cur.skip_terminators();
        if (cur.at(Tok::RBrace)) break;
        if (cur.at(Tok::Eof)) {
            return cur.make_error(cur.peek(), "unclosed block: expected '}'");
        }
        const Token& kw = cur.peek();
        if (kw.kind != Tok::Ident) {
            return cur.make_error(kw, "expected statement, got '" + kw.text + "'");
        }
        std::string word = kw.text;
        if (word == "item") {
            cur.next();
            RubricItem item;
            if (!cur.at(Tok::String)) {
                return cur.make_error(cur.peek(), "expected quoted item key");
            }
            item.key = normalize_label(cur.next().text);
            if (item.key.empty()) {
                return cur.make_error(kw, "item key must be non-empty");
            }
            if (cur.at(Tok::Ident) && cur.peek().text == "points") {
                cur.next();
                if (!cur.at(Tok::Int)) {
                    return cur.make_error(cur.peek(), "expected point value");
                }
                const Token& points_token = cur.next();
                if (points_token.value < 0) {
                    return cur.make_error(points_token, "points must be non-negative");
                }
                item.points = static_cast<double>(points_token.value);
            }
            rubric.items.push_back(std::move(item));
        } else if (word == "competency") {
            cur.next();
            for (;;) {
                if (!cur.at(Tok::Ident) || cur.peek().text.size() != 1 ||
                    cur.peek().text[0] < 'A' || cur.peek().text[0] > 'O') {
                    return cur.make_error(cur.peek(), "expected competency tag A..O");
                }
                rubric.competency.push_back(cur.next().text[0]);
                if (cur.at(Tok::Comma)) {
                    cur.next();
                    continue;
                }
                break;
            }
        } else if (word == "taxonomy") {
            cur.next();
            if (!cur.at(Tok::Ident)) {
                return cur.make_error(cur.peek(), "expected taxonomy level");
            }
            const Token& level_token = cur.next();
            if (level_token.text == "remember") rubric.taxonomy = Taxonomy::Remember;
            else if (level_token.text == "understand") rubric.taxonomy = Taxonomy::Understand;
            else if (level_token.text == "apply") rubric.taxonomy = Taxonomy::Apply;
            else if (level_token.text == "analyze") rubric.taxonomy = Taxonomy::Analyze;
            else if (level_token.text == "evaluate") rubric.taxonomy = Taxonomy::Evaluate;
            else if (level_token.text == "create") rubric.taxonomy = Taxonomy::Create;
            else {
                return cur.make_error(level_token,
                                      "unknown taxonomy level '" + level_token.text + "'");
            }
        } else {
            return cur.make_error(kw, "unknown keyword '" + word + "'");
        }
        if (!cur.finish_statement(error)) return error;
    }
    cur.next();  // consume '}'
    cur.skip_terminators();
    if (!cur.at(Tok::Eof)) {
        return cur.make_error(cur.peek(), "unexpected input after closing '}'");
    }
    return rubric;
}

namespace {

std::string quoted(const std::string& text) {
    std::string out = "\"";
    for (char c : text) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out.push_back(c);
        }
    }
    out.push_back('"');
    return out;
}

void write_activity_body(const ActivityGraph& graph, std::ostringstream& out, int level) {
    std::string ind(static_cast<std::size_t>(level) * 2, ' ');
    for (const Node& n : graph.nodes) {
        out << ind << to_keyword(n.kind) << ' ' << n.id;
        if (n.kind == NodeKind::Action) {
            out << ' ' << quoted(n.label);
            if (!n.effect.empty()) out << " effect " << quoted(n.effect);
        } else if (n.kind == NodeKind::LoopNode) {
            out << ' ' << quoted(n.label) << " {\n";
            if (n.has_body()) write_activity_body(n.body.front(), out, level + 1);
            out << ind << "}";
        }
        out << '\n';
    }
    for (const Edge& e : graph.edges) {
        out << ind << "flow " << e.source << " -> " << e.target;
        if (!e.guard.empty()) out << " guard " << quoted(e.guard);
        out << '\n';
    }
    for (const ControlAnnotation& a : graph.annotations) {
        out << ind << "annot " << to_keyword(a.construct) << " #" << a.number << " open "
            << a.open_node << " close " << a.close_node << " cond " << quoted(a.condition)
            << '\n';
    }
}

}  // namespace

std::string serialize_activity(const ActivityGraph& graph) {
    std::ostringstream out;
    out << "activity " << quoted(graph.name) << " {\n";
    write_activity_body(graph, out, 1);
    out << "}\n";
    return out.str();
}

std::string serialize_sequence(const SequenceModel& model) {
    std::ostringstream out;
    out << "sequence " << quoted(model.name) << " {\n";
    for (const Lifeline& l : model.lifelines) {
        out << "  lifeline " << l.id << ' ' << quoted(l.label) << '\n';
    }

    // Rebuild block nesting from the interval structure: at each event index,
    // open fragments ordered widest-first, close in reverse.
    std::vector<const Fragment*> by_order;
    for (const Fragment& f : model.fragments) by_order.push_back(&f);
    std::stable_sort(by_order.begin(), by_order.end(), [](const Fragment* a, const Fragment* b) {
        if (a->span.first != b->span.first) return a->span.first < b->span.first;
        return a->span.last > b->span.last;
    });

    std::vector<const Fragment*> open_stack;
    std::size_t next_fragment = 0;
    auto indent = [&]() { return std::string(2 * (open_stack.size() + 1), ' '); };

    for (const MessageEvent& e : model.events) {
        while (!open_stack.empty() && open_stack.back()->span.last < e.order) {
            open_stack.pop_back();
            out << indent() << "}\n";
        }
        // Operand boundaries of already-open alts come before any fragment
        // that opens at this index (such fragments live inside the new operand).
        for (const Fragment* f : open_stack) {
            if (f->kind != FragmentKind::Alt) continue;
            for (std::size_t i = 1; i < f->operands.size(); i++) {
                if (f->operands[i].first == e.order) {
                    // Operand conditions are not stored in the model; emit a
                    // neutral marker.
                    out << indent() << "operand \"else\"\n";
                }
            }
        }
        while (next_fragment < by_order.size() && by_order[next_fragment]->span.first == e.order) {
            const Fragment* f = by_order[next_fragment];
            out << indent() << "fragment " << to_keyword(f->kind) << " #" << f->number
                << " cond " << quoted(f->condition) << " {\n";
            open_stack.push_back(f);
            next_fragment++;
        }
        out << indent() << "msg " << e.id << ' ' << e.from << " -> " << e.to << ' '
            << quoted(e.label) << ' ' << to_keyword(e.kind) << '\n';
    }
    while (!open_stack.empty()) {
        open_stack.pop_back();
        out << indent() << "}\n";
    }
    out << "}\n";
    return out.str();
}

}  // namespace wellform
