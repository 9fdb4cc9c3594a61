package demo;

import org.junit.Test;
import static org.junit.Assert.assertEquals;

public class BitsTest {
    @Test
    public void shiftingAllBitsOutLeavesNothing() {
        assertEquals(0, new Bits().showBug(7));
    }
}
