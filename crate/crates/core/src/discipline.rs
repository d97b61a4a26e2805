//! The closed 27-discipline classification and compact discipline sets.
//!
//! Declaration order follows the reference-frequency ranking of the
//! classification table (MEDI first, EARTH last); [`Discipline::index`] is that
//! position and is used to index count vectors and matrices.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SubjectArea {
    HealthSciences,
    LifeSciences,
    PhysicalSciences,
    SocialSciences,
    /// Multidisciplinary journals belong to no subject area.
    None,
}

impl SubjectArea {
    pub fn name(self) -> &'static str {
        match self {
            SubjectArea::HealthSciences => "Health Sciences",
            SubjectArea::LifeSciences => "Life Sciences",
            SubjectArea::PhysicalSciences => "Physical Sciences",
            SubjectArea::SocialSciences => "Social Sciences",
            SubjectArea::None => "",
        }
    }
}

macro_rules! disciplines {
    ($( $variant:ident => $abbr:literal, $name:literal, $area:ident; )*) => {
        /// One of the 27 first-level disciplines.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum Discipline {
            $( $variant, )*
        }

        impl Discipline {
            pub const ALL: [Discipline; 27] = [ $( Discipline::$variant, )* ];

            /// Short code, e.g. `MEDI`.
            pub fn abbrev(self) -> &'static str {
                match self { $( Discipline::$variant => $abbr, )* }
            }

            pub fn name(self) -> &'static str {
                match self { $( Discipline::$variant => $name, )* }
            }

            pub fn subject_area(self) -> SubjectArea {
                match self { $( Discipline::$variant => SubjectArea::$area, )* }
            }
        }
    };
}

disciplines! {
    Medi => "MEDI", "Medicine", HealthSciences;
    Immu => "IMMU", "Immunology and Microbiology", LifeSciences;
    Bioc => "BIOC", "Biochemistry, Genetics and Molecular Biology", LifeSciences;
    Mult => "MULT", "Multidisciplinary", None;
    Agri => "AGRI", "Agricultural and Biological Sciences", LifeSciences;
    Pharm => "PHARM", "Pharmacology, Toxicology and Pharmaceutics", LifeSciences;
    Vete => "VETE", "Veterinary", HealthSciences;
    Neur => "NEUR", "Neuroscience", LifeSciences;
    Chem => "CHEM", "Chemistry", PhysicalSciences;
    Cheme => "CHEME", "Chemical Engineering", PhysicalSciences;
    Envi => "ENVI", "Environmental Science", PhysicalSciences;
    Engr => "ENGR", "Engineering", PhysicalSciences;
    Nurs => "NURS", "Nursing", HealthSciences;
    Cs => "CS", "Computer Science", PhysicalSciences;
    Phys => "PHYS", "Physics and Astronomy", PhysicalSciences;
    Mater => "MATER", "Materials Science", PhysicalSciences;
    Soci => "SOCI", "Social Sciences", SocialSciences;
    Math => "MATH", "Mathematics", PhysicalSciences;
    Psyc => "PSYC", "Psychology", SocialSciences;
    Heal => "HEAL", "Health Professions", HealthSciences;
    Busi => "BUSI", "Business, Management and Accounting", SocialSciences;
    Arts => "ARTS", "Arts and Humanities", SocialSciences;
    Econ => "ECON", "Economics, Econometrics and Finance", SocialSciences;
    Decis => "DECIS", "Decision Sciences", SocialSciences;
    Dent => "DENT", "Dentistry", HealthSciences;
    Energy => "ENERGY", "Energy", PhysicalSciences;
    Earth => "EARTH", "Earth and Planetary Sciences", PhysicalSciences;
}

impl Discipline {
    pub const COUNT: usize = 27;

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Discipline> {
        Discipline::ALL.get(index).copied()
    }
}

impl fmt::Display for Discipline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.abbrev())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown discipline code `{0}`")]
pub struct UnknownDiscipline(pub String);

impl FromStr for Discipline {
    type Err = UnknownDiscipline;

    /// Parses a code, ignoring surrounding whitespace and case.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let code = s.trim();
        Discipline::ALL
            .iter()
            .copied()
            .find(|d| d.abbrev().eq_ignore_ascii_case(code))
            .ok_or_else(|| UnknownDiscipline(code.to_string()))
    }
}

impl Serialize for Discipline {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.abbrev())
    }
}

/// A set of disciplines stored as a bitmask; iteration follows [`Discipline::index`].
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DisciplineSet(u32);

impl DisciplineSet {
    pub const fn empty() -> Self {
        DisciplineSet(0)
    }

    pub fn insert(&mut self, d: Discipline) -> bool {
        let bit = 1u32 << d.index();
        let fresh = self.0 & bit == 0;
        self.0 |= bit;
        fresh
    }

    pub fn contains(&self, d: Discipline) -> bool {
        self.0 & (1u32 << d.index()) != 0
    }

    pub fn union(self, other: DisciplineSet) -> DisciplineSet {
        DisciplineSet(self.0 | other.0)
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(&self) -> impl Iterator<Item = Discipline> + '_ {
        let bits = self.0;
        Discipline::ALL
            .iter()
            .copied()
            .filter(move |d| bits & (1u32 << d.index()) != 0)
    }

    /// Codes joined by `;`, the catalog file convention.
    pub fn to_codes(&self) -> String {
        self.iter().map(Discipline::abbrev).collect::<Vec<_>>().join(";")
    }
}

impl FromIterator<Discipline> for DisciplineSet {
    fn from_iter<I: IntoIterator<Item = Discipline>>(iter: I) -> Self {
        let mut set = DisciplineSet::empty();
        for d in iter {
            set.insert(d);
        }
        set
    }
}

impl fmt::Debug for DisciplineSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl Serialize for DisciplineSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_is_closed_and_ordered() {
        assert_eq!(Discipline::ALL.len(), 27);
        for (i, d) in Discipline::ALL.iter().enumerate() {
            assert_eq!(d.index(), i);
            assert_eq!(Discipline::from_index(i), Some(*d));
        }
        assert_eq!(Discipline::ALL[0].abbrev(), "MEDI");
        assert_eq!(Discipline::ALL[26].abbrev(), "EARTH");
        assert_eq!(Discipline::from_index(27), None);
    }

    #[test]
    fn only_mult_lacks_subject_area() {
        let none: Vec<_> = Discipline::ALL
            .iter()
            .filter(|d| d.subject_area() == SubjectArea::None)
            .collect();
        assert_eq!(none, vec![&Discipline::Mult]);
    }

    #[test]
    fn parse_codes() {
        assert_eq!("BIOC".parse::<Discipline>().unwrap(), Discipline::Bioc);
        assert_eq!(" cheme ".parse::<Discipline>().unwrap(), Discipline::Cheme);
        assert!("XYZ".parse::<Discipline>().is_err());
        for d in Discipline::ALL {
            assert_eq!(d.abbrev().parse::<Discipline>().unwrap(), d);
        }
    }

    #[test]
    fn set_operations() {
        let mut s = DisciplineSet::empty();
        assert!(s.is_empty());
        assert!(s.insert(Discipline::Medi));
        assert!(!s.insert(Discipline::Medi));
        s.insert(Discipline::Earth);
        assert_eq!(s.len(), 2);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![Discipline::Medi, Discipline::Earth]);
        assert_eq!(s.to_codes(), "MEDI;EARTH");
        let t: DisciplineSet = [Discipline::Cs].into_iter().collect();
        assert_eq!(s.union(t).len(), 3);
    }
}
