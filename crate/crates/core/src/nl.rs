//! Built-in Dutch language resources: name/location/institution lookup
//! lists, titles, month and weekday vocabulary, date-cue words.
//!
//! These back the default rule tagger configuration and the surrogate
//! pools. Production deployments are expected to load larger external
//! lists; the built-ins keep the toolkit usable out of the box.

pub const TITLES: [&str; 9] = [
    "Dhr.", "Mw.", "Mevr.", "Dr.", "Drs.", "Prof.", "Ing.", "Ir.", "Mr.",
];

pub const FIRST_NAMES: [&str; 48] = [
    "Jan", "Piet", "Kees", "Henk", "Ingrid", "Maria", "Johanna", "Cornelia", "Willem", "Hendrik",
    "Anna", "Elisabeth", "Johannes", "Gerrit", "Jacobus", "Adriana", "Petronella", "Wilhelmina",
    "Sophie", "Julia", "Emma", "Daan", "Sem", "Lucas", "Milan", "Levi", "Luuk", "Thijs", "Jesse",
    "Lars", "Fleur", "Lotte", "Sanne", "Iris", "Naomi", "Esmee", "Roos", "Tess", "Anouk", "Femke",
    "Bram", "Ruben", "Tim", "Niels", "Koen", "Jeroen", "Marieke", "Annelies",
];

pub const SURNAMES: [&str; 48] = [
    "Jansen", "de Vries", "van den Berg", "van Dijk", "Bakker", "Janssen", "Visser", "Smit",
    "Meijer", "de Boer", "Mulder", "de Groot", "Bos", "Vos", "Peters", "Hendriks", "van Leeuwen",
    "Dekker", "Brouwer", "de Wit", "Dijkstra", "Smits", "de Graaf", "van der Meer",
    "van der Linden", "Kok", "Jacobs", "de Haan", "Vermeulen", "van den Heuvel", "van der Veen",
    "van den Broek", "de Bruijn", "de Bruin", "van der Heijden", "Schouten", "van Beek", "Willems",
    "van Vliet", "van de Ven", "Hoekstra", "Maas", "Verhoeven", "Koster", "van Dam",
    "van der Wal", "Prins", "Blom",
];

pub const CITIES: [&str; 36] = [
    "Amsterdam", "Rotterdam", "Den Haag", "Utrecht", "Eindhoven", "Groningen", "Tilburg",
    "Almere", "Breda", "Nijmegen", "Enschede", "Apeldoorn", "Haarlem", "Arnhem", "Zaanstad",
    "Amersfoort", "Hoorn", "Zwolle", "Leiden", "Maastricht", "Dordrecht", "Ede",
    "Alphen aan den Rijn", "Leeuwarden", "Alkmaar", "Emmen", "Delft", "Venlo", "Deventer",
    "Helmond", "Kamerik", "Groenlo", "Winterswijk", "Doetinchem", "Bennebroek", "Heerlen",
];

pub const STREETS: [&str; 24] = [
    "Kerkstraat", "Schoolstraat", "Molenweg", "Dorpsstraat", "Julianastraat", "Beatrixstraat",
    "Stationsweg", "Wilhelminastraat", "Emmastraat", "Parallelweg", "Industrieweg", "Sportlaan",
    "Lindenlaan", "Eikenlaan", "Beukenlaan", "Meidoornstraat", "Prins Bernhardstraat",
    "Burgemeester de Vlugtlaan", "Van Meeuwenstraat", "Hoofdstraat", "Nieuwstraat", "Achterweg",
    "Zandweg", "Wite Mar",
];

pub const COUNTRIES: [&str; 16] = [
    "Nederland", "België", "Duitsland", "Frankrijk", "Spanje", "Italië", "Turkije", "Marokko",
    "Suriname", "Indonesië", "Polen", "Engeland", "Portugal", "Griekenland", "Oostenrijk",
    "Zwitserland",
];

pub const INSTITUTIONS: [&str; 30] = [
    "Duinendaal", "Zorgcentrum De Linde", "Sint Anna Ziekenhuis", "UMC Utrecht", "De Wever",
    "Careyn", "Buurtzorg", "Zonnehuisgroep", "Het Baken", "De Hoven", "Vilente", "Marga Klompé",
    "Sensire", "Azora", "Attent Zorg", "Liemerije", "Pleyade", "Innoforte", "De Waalboog",
    "Kalorama", "ZZG Zorggroep", "Pro Persona", "GGNet", "Dimence", "Tactus", "Pluryn", "Siza",
    "Philadelphia Zorg", "De Driestroom", "Elver",
];

pub const MONTHS_FULL: [&str; 12] = [
    "januari", "februari", "maart", "april", "mei", "juni", "juli", "augustus", "september",
    "oktober", "november", "december",
];

/// Conventional Dutch month abbreviations, index-aligned with
/// [`MONTHS_FULL`].
pub const MONTHS_ABBREV: [&str; 12] = [
    "jan", "feb", "mrt", "apr", "mei", "jun", "jul", "aug", "sep", "okt", "nov", "dec",
];

pub const WEEKDAYS: [&str; 7] = [
    "maandag", "dinsdag", "woensdag", "donderdag", "vrijdag", "zaterdag", "zondag",
];

pub const SEASONS: [&str; 6] = ["lente", "zomer", "herfst", "winter", "voorjaar", "najaar"];

/// Words that mark an adjacent standalone year as a date.
pub const DATE_CUES: [&str; 9] = [
    "in", "sinds", "vanaf", "per", "tot", "datum", "geboren", "sedert", "jaar",
];

/// Resolve a month name (full or abbreviated, optionally with a trailing
/// period, any capitalization) to its 1-based month number.
pub fn month_number(word: &str) -> Option<u32> {
    let w = word.trim_end_matches('.').to_lowercase();
    if let Some(i) = MONTHS_FULL.iter().position(|m| *m == w) {
        return Some(i as u32 + 1);
    }
    if let Some(i) = MONTHS_ABBREV.iter().position(|m| *m == w) {
        return Some(i as u32 + 1);
    }
    // "sept" is a common variant
    if w == "sept" {
        return Some(9);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn month_lookup_handles_variants() {
        assert_eq!(month_number("november"), Some(11));
        assert_eq!(month_number("nov"), Some(11));
        assert_eq!(month_number("Nov."), Some(11));
        assert_eq!(month_number("sept"), Some(9));
        assert_eq!(month_number("mei"), Some(5));
        assert_eq!(month_number("kerst"), None);
    }
}
