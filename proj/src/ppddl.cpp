#include "portsym/ppddl.hpp"

#include <charconv>
#include <set>
#include <sstream>

namespace portsym {
namespace {

std::string number(double v) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

std::string predicate(const Vocabulary& vocab, int id) { return vocab.at(id).name; }

bool masks_intersect(const Symbol& a, const Symbol& b) {
  for (Index i : a.mask)
    if (std::find(b.mask.begin(), b.mask.end(), i) != b.mask.end()) return true;
  return false;
}

// Adds the outcome's effect symbols; deletes precondition symbols its effects overwrite.
PpddlOutcome outcome_of(const PortableModel& model, const PortableRule& rule, const Outcome& out) {
  PpddlOutcome o;
  o.probability = out.probability;
  std::set<int> dels;
  for (int e : out.effects) {
    o.add.push_back(predicate(model.vocabulary, e));
    for (const auto& clause : rule.precondition.symbolic)
      for (int p : clause)
        if (p != e && masks_intersect(model.vocabulary.at(p), model.vocabulary.at(e))) dels.insert(p);
  }
  for (int d : dels) o.del.push_back(predicate(model.vocabulary, d));
  return o;
}

std::vector<std::vector<std::string>> precondition_of(const PortableModel& model, const PortableRule& rule) {
  std::vector<std::vector<std::string>> out;
  for (const auto& clause : rule.precondition.symbolic) {
    std::vector<std::string> names;
    for (int id : clause) names.push_back(predicate(model.vocabulary, id));
    out.push_back(std::move(names));
  }
  return out;
}

std::string rule_name(const PortableRule& rule) {
  return (rule.option_name.empty() ? "option" + std::to_string(rule.option_id) : rule.option_name) + "_" +
         std::to_string(rule.partition);
}

std::vector<std::string> predicates_of(const PortableModel& model) {
  std::vector<std::string> preds;
  for (const auto& s : model.vocabulary.symbols()) preds.push_back(s.name);
  preds.push_back("notfailed");
  return preds;
}

}  // namespace

PpddlDomain to_ppddl(const GroundedModel& gm, const std::string& name) {
  const PortableModel& model = *gm.portable;
  PpddlDomain d;
  d.name = name;
  d.predicates = predicates_of(model);
  d.partition_function = true;
  for (const auto& op : gm.operators) {
    const PortableRule& rule = *model.find_rule(op.option_id, op.partition);
    PpddlAction a;
    a.name = rule_name(rule) + "_p" + std::to_string(op.start_label);
    a.precondition = precondition_of(model, rule);
    a.partition = op.start_label;
    for (const auto& e : op.outcomes) {
      PpddlOutcome o = outcome_of(model, rule, rule.outcomes[std::size_t(e.outcome)]);
      o.probability = e.probability;
      o.assign_partition = e.end_label;
      a.outcomes.push_back(std::move(o));
    }
    d.actions.push_back(std::move(a));
  }
  return d;
}

PpddlDomain to_ppddl(const PortableModel& model, const std::string& name) {
  PpddlDomain d;
  d.name = name;
  d.predicates = predicates_of(model);
  for (const auto& rule : model.rules) {
    PpddlAction a;
    a.name = rule_name(rule);
    a.precondition = precondition_of(model, rule);
    for (const auto& out : rule.outcomes) a.outcomes.push_back(outcome_of(model, rule, out));
    d.actions.push_back(std::move(a));
  }
  return d;
}

std::string emit_ppddl(const PpddlDomain& d) {
  std::ostringstream os;
  os << "(define (domain " << d.name << ")\n";
  os << "  (:requirements :strips :probabilistic-effects" << (d.partition_function ? " :fluents" : "") << ")\n";
  os << "  (:predicates";
  for (const auto& p : d.predicates) os << " (" << p << ")";
  os << ")\n";
  if (d.partition_function) os << "  (:functions (partition))\n";
  auto outcome = [](const PpddlOutcome& o) {
    std::string s = "(and";
    for (const auto& p : o.add) s += " (" + p + ")";
    for (const auto& p : o.del) s += " (not (" + p + "))";
    if (o.assign_partition) s += " (assign (partition) " + std::to_string(*o.assign_partition) + ")";
    return s + ")";
  };
  for (const auto& a : d.actions) {
    os << "\n  (:action " << a.name << "\n    :parameters ()\n    :precondition (and";
    for (const auto& clause : a.precondition) {
      if (clause.size() == 1) {
        os << " (" << clause.front() << ")";
      } else {
        os << " (or";
        for (const auto& p : clause) os << " (" << p << ")";
        os << ")";
      }
    }
    os << " (notfailed)";
    if (a.partition) os << " (= (partition) " << *a.partition << ")";
    os << ")\n    :effect ";
    if (a.outcomes.size() == 1 && a.outcomes.front().probability == 1.0) {
      os << outcome(a.outcomes.front());
    } else {
      os << "(probabilistic";
      for (const auto& o : a.outcomes) os << "\n      " << number(o.probability) << " " << outcome(o);
      os << ")";
    }
    os << ")\n";
  }
  os << ")\n";
  return os.str();
}

std::string emit_ppddl(const GroundedModel& gm, const std::string& name) { return emit_ppddl(to_ppddl(gm, name)); }
std::string emit_ppddl(const PortableModel& model, const std::string& name) {
  return emit_ppddl(to_ppddl(model, name));
}

namespace {

struct Sexp {
  bool is_list = false;
  std::string atom;
  std::vector<Sexp> items;
  std::size_t line = 0, column = 0;
};

class Reader {
 public:
  explicit Reader(const std::string& text) : text_(text) {}

  Sexp read() {
    skip();
    if (pos_ >= text_.size()) fail("'('", "end of input");
    Sexp s = read_one();
    skip();
    if (pos_ < text_.size()) fail("end of input", std::string(1, text_[pos_]));
    return s;
  }

 private:
  [[noreturn]] void fail(const std::string& expected, const std::string& found) {
    throw ParseError("ppddl: expected " + expected + ", found " + found + " at line " + std::to_string(line_) +
                         ", column " + std::to_string(col_),
                     line_, col_);
  }
  void advance() {
    if (text_[pos_] == '\n') ++line_, col_ = 1;
    else ++col_;
    ++pos_;
  }
  void skip() {
    while (pos_ < text_.size()) {
      if (std::isspace(static_cast<unsigned char>(text_[pos_]))) advance();
      else if (text_[pos_] == ';')
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      else break;
    }
  }
  Sexp read_one() {
    Sexp s;
    s.line = line_, s.column = col_;
    if (text_[pos_] == ')') fail("'(' or atom", "')'");
    if (text_[pos_] == '(') {
      s.is_list = true;
      advance();
      for (;;) {
        skip();
        if (pos_ >= text_.size()) fail("')'", "end of input");
        if (text_[pos_] == ')') {
          advance();
          return s;
        }
        s.items.push_back(read_one());
      }
    }
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) && text_[pos_] != '(' &&
           text_[pos_] != ')' && text_[pos_] != ';') {
      s.atom.push_back(text_[pos_]);
      advance();
    }
    return s;
  }

  const std::string& text_;
  std::size_t pos_ = 0, line_ = 1, col_ = 1;
};

[[noreturn]] void expect_fail(const Sexp& at, const std::string& expected) {
  const std::string found = at.is_list ? (at.items.empty() ? "'()'" : "list") : "'" + at.atom + "'";
  throw ParseError("ppddl: expected " + expected + ", found " + found + " at line " + std::to_string(at.line) +
                       ", column " + std::to_string(at.column),
                   at.line, at.column);
}

const Sexp& item(const Sexp& list, std::size_t i, const std::string& expected) {
  if (!list.is_list || i >= list.items.size()) expect_fail(list, expected);
  return list.items[i];
}

bool is_head(const Sexp& s, const std::string& head) {
  return s.is_list && !s.items.empty() && !s.items[0].is_list && s.items[0].atom == head;
}

std::string atom(const Sexp& s, const std::string& expected) {
  if (s.is_list || s.atom.empty()) expect_fail(s, expected);
  return s.atom;
}

std::string proposition(const Sexp& s) {
  if (!s.is_list || s.items.size() != 1) expect_fail(s, "a proposition '(name)'");
  return atom(s.items[0], "predicate name");
}

int integer(const Sexp& s) {
  const std::string a = atom(s, "integer");
  int v = 0;
  const auto [p, ec] = std::from_chars(a.data(), a.data() + a.size(), v);
  if (ec != std::errc() || p != a.data() + a.size()) expect_fail(s, "integer");
  return v;
}

double real(const Sexp& s) {
  const std::string a = atom(s, "probability");
  double v = 0;
  const auto [p, ec] = std::from_chars(a.data(), a.data() + a.size(), v);
  if (ec != std::errc() || p != a.data() + a.size() || v < 0 || v > 1) expect_fail(s, "probability in [0, 1]");
  return v;
}

bool is_partition_ref(const Sexp& s) {
  return s.is_list && s.items.size() == 1 && !s.items[0].is_list && s.items[0].atom == "partition";
}

PpddlOutcome parse_outcome(const Sexp& s, double probability) {
  if (!is_head(s, "and")) expect_fail(s, "'(and ...)' effect");
  PpddlOutcome o;
  o.probability = probability;
  for (std::size_t i = 1; i < s.items.size(); ++i) {
    const Sexp& e = s.items[i];
    if (is_head(e, "not")) {
      if (e.items.size() != 2) expect_fail(e, "'(not (name))'");
      o.del.push_back(proposition(e.items[1]));
    } else if (is_head(e, "assign")) {
      if (e.items.size() != 3 || !is_partition_ref(e.items[1])) expect_fail(e, "'(assign (partition) N)'");
      o.assign_partition = integer(e.items[2]);
    } else {
      o.add.push_back(proposition(e));
    }
  }
  return o;
}

PpddlAction parse_action(const Sexp& s) {
  PpddlAction a;
  a.name = atom(item(s, 1, "action name"), "action name");
  std::size_t i = 2;
  auto keyword = [&](const std::string& kw) -> const Sexp& {
    const Sexp& k = item(s, i, "'" + kw + "'");
    if (k.is_list || k.atom != kw) expect_fail(k, "'" + kw + "'");
    const Sexp& v = item(s, i + 1, "value after '" + kw + "'");
    i += 2;
    return v;
  };
  const Sexp& params = keyword(":parameters");
  if (!params.is_list || !params.items.empty()) expect_fail(params, "'()'");
  const Sexp& pre = keyword(":precondition");
  if (!is_head(pre, "and")) expect_fail(pre, "'(and ...)' precondition");
  for (std::size_t k = 1; k < pre.items.size(); ++k) {
    const Sexp& c = pre.items[k];
    if (is_head(c, "or")) {
      std::vector<std::string> clause;
      for (std::size_t j = 1; j < c.items.size(); ++j) clause.push_back(proposition(c.items[j]));
      if (clause.empty()) expect_fail(c, "a non-empty disjunction");
      a.precondition.push_back(std::move(clause));
    } else if (is_head(c, "=")) {
      if (c.items.size() != 3 || !is_partition_ref(c.items[1])) expect_fail(c, "'(= (partition) N)'");
      a.partition = integer(c.items[2]);
    } else {
      const std::string p = proposition(c);
      if (p != "notfailed") a.precondition.push_back({p});
    }
  }
  const Sexp& eff = keyword(":effect");
  if (is_head(eff, "probabilistic")) {
    if (eff.items.size() < 3 || eff.items.size() % 2 == 0) expect_fail(eff, "probability/effect pairs");
    for (std::size_t k = 1; k < eff.items.size(); k += 2)
      a.outcomes.push_back(parse_outcome(eff.items[k + 1], real(eff.items[k])));
  } else {
    a.outcomes.push_back(parse_outcome(eff, 1.0));
  }
  if (i != s.items.size()) expect_fail(s.items[i], "')' closing the action");
  return a;
}

}  // namespace

PpddlDomain parse_ppddl(const std::string& text) {
  const Sexp root = Reader(text).read();
  if (!is_head(root, "define")) expect_fail(root, "'(define ...)'");
  const Sexp& header = item(root, 1, "'(domain NAME)'");
  if (!is_head(header, "domain") || header.items.size() != 2) expect_fail(header, "'(domain NAME)'");
  PpddlDomain d;
  d.name = atom(header.items[1], "domain name");
  for (std::size_t i = 2; i < root.items.size(); ++i) {
    const Sexp& sec = root.items[i];
    if (is_head(sec, ":requirements")) {
      for (std::size_t k = 1; k < sec.items.size(); ++k) atom(sec.items[k], "requirement keyword");
    } else if (is_head(sec, ":predicates")) {
      for (std::size_t k = 1; k < sec.items.size(); ++k) d.predicates.push_back(proposition(sec.items[k]));
    } else if (is_head(sec, ":functions")) {
      if (sec.items.size() != 2 || !is_partition_ref(sec.items[1])) expect_fail(sec, "'(:functions (partition))'");
      d.partition_function = true;
    } else if (is_head(sec, ":action")) {
      d.actions.push_back(parse_action(sec));
    } else {
      expect_fail(sec, "':requirements', ':predicates', ':functions' or ':action'");
    }
  }
  return d;
}

}  // namespace portsym
