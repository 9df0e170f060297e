#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace appc {

using TypeId = std::int32_t;
using ObjectId = std::int32_t;
using PredId = std::int32_t;
using VarId = std::int32_t;

// A type signature: types, typed objects, typed predicates (arity 1 or 2),
// typed variables. Immutable after construction; names are case-insensitive
// ASCII identifiers stored lower-case and sorted, so ids follow the canonical
// lexicographic order.
class Signature {
public:
    struct Object {
        std::string name;
        TypeId type;
    };
    struct Predicate {
        std::string name;
        std::vector<TypeId> arg_types;  // length 1 or 2
    };
    struct Variable {
        std::string name;
        TypeId type;
    };

    class Builder {
    public:
        Builder& type(const std::string& name);
        Builder& object(const std::string& name, const std::string& type_name);
        Builder& pred(const std::string& name, const std::vector<std::string>& arg_type_names);
        Builder& var(const std::string& name, const std::string& type_name);
        // Validates invariants (known types, arity 1-2, disjoint name spaces),
        // sorts everything, and produces the immutable signature.
        std::shared_ptr<const Signature> build() const;

    private:
        std::vector<std::string> types_;
        std::vector<std::pair<std::string, std::string>> objects_;
        std::vector<std::pair<std::string, std::vector<std::string>>> preds_;
        std::vector<std::pair<std::string, std::string>> vars_;
    };

    std::size_t num_types() const { return types_.size(); }
    std::size_t num_objects() const { return objects_.size(); }
    std::size_t num_preds() const { return preds_.size(); }
    std::size_t num_vars() const { return vars_.size(); }

    const std::string& type_name(TypeId t) const { return types_[t]; }
    const Object& object(ObjectId o) const { return objects_[o]; }
    const Predicate& pred(PredId p) const { return preds_[p]; }
    const Variable& var(VarId v) const { return vars_[v]; }

    std::optional<TypeId> find_type(const std::string& name) const;
    std::optional<ObjectId> find_object(const std::string& name) const;
    std::optional<PredId> find_pred(const std::string& name) const;
    std::optional<VarId> find_var(const std::string& name) const;

    const std::vector<ObjectId>& objects_of_type(TypeId t) const { return objs_by_type_[t]; }
    const std::vector<VarId>& vars_of_type(TypeId t) const { return vars_by_type_[t]; }

    bool same_decls(const Signature& o) const;

private:
    friend class Builder;
    Signature() = default;

    std::vector<std::string> types_;
    std::vector<Object> objects_;
    std::vector<Predicate> preds_;
    std::vector<Variable> vars_;
    std::map<std::string, TypeId> type_index_;
    std::map<std::string, ObjectId> object_index_;
    std::map<std::string, PredId> pred_index_;
    std::map<std::string, VarId> var_index_;
    std::vector<std::vector<ObjectId>> objs_by_type_;
    std::vector<std::vector<VarId>> vars_by_type_;
};

using SignaturePtr = std::shared_ptr<const Signature>;

// Lower-cases and validates an ASCII identifier ([a-z_][a-z0-9_*]*).
std::string canonical_name(const std::string& raw);

}  // namespace appc
