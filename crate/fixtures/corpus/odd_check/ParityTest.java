package demo;

import org.junit.Test;
import static org.junit.Assert.assertTrue;

public class ParityTest {
    @Test
    public void negativeOdd() {
        assertTrue(new Parity().showBug(-3));
    }
}
