//! Builtin functions callable without a receiver.

use super::ast::Type;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    Println,
    Print,
    ReadLine,
    Sqrt,
    Abs,
    Min,
    Max,
    ParseInt,
}

impl Builtin {
    pub const ALL: [Builtin; 8] = [
        Builtin::Println,
        Builtin::Print,
        Builtin::ReadLine,
        Builtin::Sqrt,
        Builtin::Abs,
        Builtin::Min,
        Builtin::Max,
        Builtin::ParseInt,
    ];

    pub fn from_name(name: &str) -> Option<Builtin> {
        Builtin::ALL.into_iter().find(|b| b.name() == name)
    }

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Println => "println",
            Builtin::Print => "print",
            Builtin::ReadLine => "readLine",
            Builtin::Sqrt => "sqrt",
            Builtin::Abs => "abs",
            Builtin::Min => "min",
            Builtin::Max => "max",
            Builtin::ParseInt => "parseInt",
        }
    }

    pub fn arity_ok(self, n: usize) -> bool {
        match self {
            Builtin::Println => n <= 1,
            Builtin::ReadLine => n == 0,
            Builtin::Print | Builtin::Sqrt | Builtin::Abs | Builtin::ParseInt => n == 1,
            Builtin::Min | Builtin::Max => n == 2,
        }
    }

    /// Observable effects (output or input consumption).
    pub fn is_impure(self) -> bool {
        matches!(self, Builtin::Println | Builtin::Print | Builtin::ReadLine)
    }

    pub fn may_fault(self) -> bool {
        matches!(self, Builtin::ParseInt)
    }

    pub fn result_type(self, args: &[Option<Type>]) -> Type {
        match self {
            Builtin::Println | Builtin::Print => Type::Void,
            Builtin::ReadLine => Type::Str,
            Builtin::Sqrt => Type::Double,
            Builtin::ParseInt => Type::Int,
            Builtin::Abs => match args.first() {
                Some(Some(Type::Int)) => Type::Int,
                _ => Type::Double,
            },
            Builtin::Min | Builtin::Max => {
                if args.iter().all(|a| matches!(a, Some(Type::Int))) {
                    Type::Int
                } else {
                    Type::Double
                }
            }
        }
    }
}
