#include "deonmf/sorts.hpp"

namespace deonmf {

Sort Sort::fun(Sort dom, Sort cod) {
  Sort s;
  s.fun_ = std::make_shared<const std::pair<Sort, Sort>>(std::move(dom),
                                                         std::move(cod));
  return s;
}

Sort::Base Sort::base() const {
  if (!base_) throw std::logic_error("Sort::base on function sort");
  return *base_;
}

const Sort& Sort::domain() const {
  if (!fun_) throw std::logic_error("Sort::domain on base sort");
  return fun_->first;
}

const Sort& Sort::codomain() const {
  if (!fun_) throw std::logic_error("Sort::codomain on base sort");
  return fun_->second;
}

bool Sort::operator==(const Sort& o) const {
  if (is_base() != o.is_base()) return false;
  if (is_base()) return *base_ == *o.base_;
  return fun_->first == o.fun_->first && fun_->second == o.fun_->second;
}

bool Sort::operator<(const Sort& o) const {
  if (is_base() != o.is_base()) return is_base();  // base sorts first
  if (is_base()) return *base_ < *o.base_;
  if (fun_->first < o.fun_->first) return true;
  if (o.fun_->first < fun_->first) return false;
  return fun_->second < o.fun_->second;
}

std::string Sort::to_string() const {
  if (*this == Sort::m()) return "M";
  if (*this == Sort::p()) return "P";
  if (*this == Sort::wo()) return "WO";
  if (is_base()) {
    switch (*base_) {
      case Base::W: return "W";
      case Base::C: return "C";
      case Base::E: return "E";
      case Base::Prop: return "Prop";
    }
  }
  // Arrow is right-associative, so parenthesize a function domain.
  std::string dom = domain().to_string();
  if (domain().is_fun() && domain() != Sort::m() && domain() != Sort::p() &&
      domain() != Sort::wo()) {
    dom = "(" + dom + ")";
  }
  return dom + " -> " + codomain().to_string();
}

const std::string Signature::kAgent = "Agent";
const std::string Signature::kWorld = "World";

Signature::Signature() {
  entries_.emplace_back(kAgent, Sort::fun(Sort::c(), Sort::e()));
  entries_.emplace_back(kWorld, Sort::fun(Sort::c(), Sort::w()));
}

void Signature::declare(const std::string& name, Sort s) {
  if (contains(name)) {
    throw std::invalid_argument("duplicate constant: " + name);
  }
  entries_.emplace_back(name, std::move(s));
}

bool Signature::contains(const std::string& name) const {
  return lookup(name) != nullptr;
}

const Sort* Signature::lookup(const std::string& name) const {
  for (const auto& [n, s] : entries_) {
    if (n == name) return &s;
  }
  return nullptr;
}

std::vector<std::pair<std::string, Sort>> Signature::user_entries() const {
  std::vector<std::pair<std::string, Sort>> out;
  for (const auto& e : entries_) {
    if (e.first != kAgent && e.first != kWorld) out.push_back(e);
  }
  return out;
}

SortAliases::SortAliases() {
  all_.emplace_back("W", Sort::w());
  all_.emplace_back("C", Sort::c());
  all_.emplace_back("E", Sort::e());
  all_.emplace_back("Prop", Sort::prop());
  all_.emplace_back("WO", Sort::wo());
  all_.emplace_back("M", Sort::m());
  all_.emplace_back("P", Sort::p());
}

void SortAliases::define(const std::string& name, Sort s) {
  if (lookup(name) != nullptr) {
    throw std::invalid_argument("duplicate sort alias: " + name);
  }
  all_.emplace_back(name, s);
  user_.emplace_back(name, std::move(s));
}

const Sort* SortAliases::lookup(const std::string& name) const {
  for (const auto& [n, s] : all_) {
    if (n == name) return &s;
  }
  return nullptr;
}

}  // namespace deonmf
