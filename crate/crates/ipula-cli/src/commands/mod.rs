pub mod bounds;
pub mod deblur;
pub mod sample;
pub mod verify;
