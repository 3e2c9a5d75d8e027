"""
Modularity checks for eta-quotients
===================================

Gordon-Hughes-Newman conditions, weight, character and the orders at cusps.
"""
from etaq import etaquot as eq

for text in ["N=1; 1^24", "N=5; 5^1 * 1^43", "N=5; 5^53 * 1^311", "N=6; 6^2 * 3^-1 * 1^5"]:
    E = eq.parse(text)
    ok, report = eq.is_cusp_form(E)
    print(E)
    print("  GHN:", eq.validate_ghn(E), " weight:", eq.weight(E))
    print("  orders:", {d: str(o) for d, o in report.entries})
    # the weighted orders always add up to weight * index / 12
    print("  valence:", report.total_valence, "expected:", eq.valence_expected(E))
    print("  cusp form:", ok)
    if ok:
        print("  chi(1..10):", [eq.character_at(E, d) for d in range(1, 11)])
