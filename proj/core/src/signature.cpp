#include "appc/signature.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <stdexcept>

namespace appc {

std::string canonical_name(const std::string& raw) {
    if (raw.empty()) throw std::invalid_argument("empty identifier");
    std::string out;
    out.reserve(raw.size());
    for (char c : raw) {
        unsigned char u = static_cast<unsigned char>(c);
        if (u >= 0x80) throw std::invalid_argument("non-ASCII identifier: " + raw);
        char l = static_cast<char>(std::tolower(u));
        if (!(std::isalnum(static_cast<unsigned char>(l)) || l == '_' || l == '*'))
            throw std::invalid_argument("bad identifier character in: " + raw);
        out.push_back(l);
    }
    if (std::isdigit(static_cast<unsigned char>(out[0])))
        throw std::invalid_argument("identifier starts with digit: " + raw);
    return out;
}

Signature::Builder& Signature::Builder::type(const std::string& name) {
    types_.push_back(canonical_name(name));
    return *this;
}

Signature::Builder& Signature::Builder::object(const std::string& name, const std::string& type_name) {
    objects_.emplace_back(canonical_name(name), canonical_name(type_name));
    return *this;
}

Signature::Builder& Signature::Builder::pred(const std::string& name,
                                             const std::vector<std::string>& arg_type_names) {
    std::vector<std::string> args;
    for (const auto& a : arg_type_names) args.push_back(canonical_name(a));
    preds_.emplace_back(canonical_name(name), std::move(args));
    return *this;
}

Signature::Builder& Signature::Builder::var(const std::string& name, const std::string& type_name) {
    vars_.emplace_back(canonical_name(name), canonical_name(type_name));
    return *this;
}

std::shared_ptr<const Signature> Signature::Builder::build() const {
    auto sig = std::shared_ptr<Signature>(new Signature());

    std::set<std::string> tset(types_.begin(), types_.end());
    if (tset.size() != types_.size()) throw std::invalid_argument("duplicate type name");
    sig->types_.assign(tset.begin(), tset.end());
    for (TypeId t = 0; t < TypeId(sig->types_.size()); ++t) sig->type_index_[sig->types_[t]] = t;

    auto type_of = [&](const std::string& n) -> TypeId {
        auto it = sig->type_index_.find(n);
        if (it == sig->type_index_.end()) throw std::invalid_argument("unknown type: " + n);
        return it->second;
    };

    auto objs = objects_;
    std::sort(objs.begin(), objs.end());
    for (const auto& [name, tn] : objs) {
        if (sig->object_index_.count(name)) throw std::invalid_argument("duplicate object: " + name);
        sig->object_index_[name] = ObjectId(sig->objects_.size());
        sig->objects_.push_back({name, type_of(tn)});
    }

    auto prds = preds_;
    std::sort(prds.begin(), prds.end());
    for (const auto& [name, args] : prds) {
        if (args.size() < 1 || args.size() > 2)
            throw std::invalid_argument("predicate arity must be 1 or 2: " + name);
        if (sig->pred_index_.count(name)) throw std::invalid_argument("duplicate predicate: " + name);
        Predicate p{name, {}};
        for (const auto& a : args) p.arg_types.push_back(type_of(a));
        sig->pred_index_[name] = PredId(sig->preds_.size());
        sig->preds_.push_back(std::move(p));
    }

    auto vrs = vars_;
    std::sort(vrs.begin(), vrs.end());
    for (const auto& [name, tn] : vrs) {
        if (sig->var_index_.count(name)) throw std::invalid_argument("duplicate variable: " + name);
        sig->var_index_[name] = VarId(sig->vars_.size());
        sig->vars_.push_back({name, type_of(tn)});
    }

    // Object, predicate, and variable name spaces must be disjoint.
    for (const auto& [n, _] : sig->object_index_) {
        if (sig->pred_index_.count(n) || sig->var_index_.count(n))
            throw std::invalid_argument("name used in two name spaces: " + n);
    }
    for (const auto& [n, _] : sig->pred_index_)
        if (sig->var_index_.count(n)) throw std::invalid_argument("name used in two name spaces: " + n);

    sig->objs_by_type_.resize(sig->types_.size());
    for (ObjectId o = 0; o < ObjectId(sig->objects_.size()); ++o)
        sig->objs_by_type_[sig->objects_[o].type].push_back(o);
    sig->vars_by_type_.resize(sig->types_.size());
    for (VarId v = 0; v < VarId(sig->vars_.size()); ++v)
        sig->vars_by_type_[sig->vars_[v].type].push_back(v);

    return sig;
}

std::optional<TypeId> Signature::find_type(const std::string& name) const {
    auto it = type_index_.find(name);
    if (it == type_index_.end()) return std::nullopt;
    return it->second;
}
std::optional<ObjectId> Signature::find_object(const std::string& name) const {
    auto it = object_index_.find(name);
    if (it == object_index_.end()) return std::nullopt;
    return it->second;
}
std::optional<PredId> Signature::find_pred(const std::string& name) const {
    auto it = pred_index_.find(name);
    if (it == pred_index_.end()) return std::nullopt;
    return it->second;
}
std::optional<VarId> Signature::find_var(const std::string& name) const {
    auto it = var_index_.find(name);
    if (it == var_index_.end()) return std::nullopt;
    return it->second;
}

bool Signature::same_decls(const Signature& o) const {
    if (types_ != o.types_) return false;
    if (objects_.size() != o.objects_.size() || preds_.size() != o.preds_.size() ||
        vars_.size() != o.vars_.size())
        return false;
    for (std::size_t i = 0; i < objects_.size(); ++i)
        if (objects_[i].name != o.objects_[i].name || objects_[i].type != o.objects_[i].type) return false;
    for (std::size_t i = 0; i < preds_.size(); ++i)
        if (preds_[i].name != o.preds_[i].name || preds_[i].arg_types != o.preds_[i].arg_types) return false;
    for (std::size_t i = 0; i < vars_.size(); ++i)
        if (vars_[i].name != o.vars_[i].name || vars_[i].type != o.vars_[i].type) return false;
    return true;
}

}  // namespace appc
