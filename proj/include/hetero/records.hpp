#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace hetero {

enum class Form { state_funded, tuition_based };

enum class Basis { competition, olympiad, out_of_competition, targeted, benefit, other };

std::string_view to_string(Form form);
std::string_view to_string(Basis basis);
/// Throws ValidationError on anything but the two schema tokens.
Form form_from_string(std::string_view text);
/// Unrecognized tokens map to Basis::other.
Basis basis_from_string(std::string_view text);

/// One admitted student. An absent score means missing.
struct StudentRecord {
    std::string university;
    Form form = Form::state_funded;
    Basis basis = Basis::competition;
    std::optional<double> score;
    bool imputed = false;

    bool missing() const { return !score.has_value(); }
    bool operator==(const StudentRecord&) const = default;
};

}  // namespace hetero
