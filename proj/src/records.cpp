#include "hetero/records.hpp"

#include <string>

#include "hetero/error.hpp"

namespace hetero {

std::string_view to_string(Form form) {
    return form == Form::state_funded ? "state_funded" : "tuition_based";
}

std::string_view to_string(Basis basis) {
    switch (basis) {
        case Basis::competition: return "competition";
        case Basis::olympiad: return "olympiad";
        case Basis::out_of_competition: return "out_of_competition";
        case Basis::targeted: return "targeted";
        case Basis::benefit: return "benefit";
        case Basis::other: return "other";
    }
    return "other";
}

Form form_from_string(std::string_view text) {
    if (text == "state_funded") return Form::state_funded;
    if (text == "tuition_based") return Form::tuition_based;
    throw ValidationError("unknown form '" + std::string(text) + "'");
}

Basis basis_from_string(std::string_view text) {
    for (auto basis : {Basis::competition, Basis::olympiad, Basis::out_of_competition, Basis::targeted,
                       Basis::benefit}) {
        if (text == to_string(basis)) return basis;
    }
    return Basis::other;
}

}  // namespace hetero
